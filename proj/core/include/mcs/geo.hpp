#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mcs/group.hpp"
#include "mcs/rng.hpp"

namespace mcs {

/* Rectangular sensing grid over a lat/long window.  Rows index the
 * longitude axis, columns the latitude axis, both at cell_deg resolution
 * with half-open cell intervals; the Ontario window (74.40W..95.15W,
 * 41.66N..57.00N) at 0.1 degrees yields a 208x154 grid. */
struct GeoFrame {
    double lon_from = 0;
    double lon_to = 0;
    double lat_from = 0;
    double lat_to = 0;
    double cell_deg = 0.1;
};

struct GridCell {
    uint32_t row = 0;
    uint32_t col = 0;
    friend bool operator==(const GridCell&, const GridCell&) = default;
    friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

// A set of cells inside an m x n grid.  Cells stay sorted and unique.
class GridRegion {
public:
    GridRegion(uint32_t rows, uint32_t cols);
    static GridRegion from_frame(const GeoFrame& f);

    uint32_t rows() const { return rows_; }
    uint32_t cols() const { return cols_; }
    bool empty() const { return cells_.empty(); }
    size_t size() const { return cells_.size(); }
    const std::vector<GridCell>& cells() const { return cells_; }

    bool contains(GridCell c) const;
    void add(GridCell c);                        // throws when out of range
    void add_rect(GridCell from, GridCell to);   // inclusive corners

    // Frame lookups; throw unless built by from_frame.  Boundary points
    // snap upward (half-open intervals with a tiny tolerance).
    GridCell cell_at(double lon, double lat) const;
    void add_point(double lon, double lat);

private:
    uint32_t rows_ = 0;
    uint32_t cols_ = 0;
    bool has_frame_ = false;
    GeoFrame frame_;
    std::vector<GridCell> cells_;
};

enum class MatrixRole : uint8_t { area, user };

/* m x n matrix with a nonzero entry exactly on each region cell; all
 * nonzero entries are pairwise distinct (resampled on collision). */
struct SparseLocationMatrix {
    MatrixRole role = MatrixRole::area;
    uint32_t m = 0;
    uint32_t n = 0;
    std::vector<Scalar> a;  // row-major

    const Scalar& at(uint32_t r, uint32_t c) const { return a[size_t(r) * n + c]; }
};

/* n x n masked product published to the provider: the area side sends
 * N = L^T * M, the user side sends N~ = M~^T * L~, each with a fresh
 * full-entry random mask. */
struct ObfuscatedMatrix {
    MatrixRole origin = MatrixRole::area;
    uint32_t n = 0;
    std::vector<Scalar> a;  // row-major

    const Scalar& at(uint32_t r, uint32_t c) const { return a[size_t(r) * n + c]; }
};

std::pair<SparseLocationMatrix, ObfuscatedMatrix>
encode_region(const GroupContext& G, const GridRegion& region, RandomSource& rng);

std::pair<SparseLocationMatrix, ObfuscatedMatrix>
encode_user_route(const GroupContext& G, const GridRegion& route, RandomSource& rng);

// The full product N~ * N the provider inspects, row-major.
std::vector<Scalar> match_product(const ObfuscatedMatrix& user, const ObfuscatedMatrix& area);

/* Provider-side decision: true iff N~ * N is not the zero matrix.  The
 * product is nonzero exactly when the route and the area touch a common
 * grid column: disjoint column sets give the zero matrix identically, a
 * shared cell always implies a shared column, and a shared column fails to
 * register only when a masked inner product vanishes mod p (probability at
 * most n^2/p per pair). */
bool match(const ObfuscatedMatrix& user, const ObfuscatedMatrix& area);

/* Columns the provider can attribute to both parties: k is reported when
 * column k of N~ and row k of N are both nonzero.  This is the provider's
 * maximal inference; rows stay hidden.  Throws unless match() holds. */
std::vector<uint32_t> leakage_profile(const ObfuscatedMatrix& user,
                                      const ObfuscatedMatrix& area);

// Wire form: u16 dimension header, then row-major fixed-width scalars.
Bytes encode_matrix(const ObfuscatedMatrix& M);
ObfuscatedMatrix decode_matrix(const GroupContext& G, const Bytes& in, MatrixRole origin);

}  // namespace mcs
