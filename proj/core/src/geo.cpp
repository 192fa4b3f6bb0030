#include "mcs/geo.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mcs {

GridRegion::GridRegion(uint32_t rows, uint32_t cols) : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) throw GroupError("geo: grid dimensions must be positive");
}

GridRegion GridRegion::from_frame(const GeoFrame& f) {
    if (!(f.cell_deg > 0) || !(f.lon_to > f.lon_from) || !(f.lat_to > f.lat_from))
        throw GroupError("geo: bad frame");
    auto count = [&](double from, double to) {
        double q = (to - from) / f.cell_deg;
        auto c = static_cast<int64_t>(std::ceil(q - 1e-6));
        return static_cast<uint32_t>(std::max<int64_t>(c, 1));
    };
    GridRegion r(count(f.lon_from, f.lon_to), count(f.lat_from, f.lat_to));
    r.frame_ = f;
    r.has_frame_ = true;
    return r;
}

bool GridRegion::contains(GridCell c) const {
    return std::binary_search(cells_.begin(), cells_.end(), c);
}

void GridRegion::add(GridCell c) {
    if (c.row >= rows_ || c.col >= cols_) throw GroupError("geo: cell out of range");
    auto it = std::lower_bound(cells_.begin(), cells_.end(), c);
    if (it == cells_.end() || !(*it == c)) cells_.insert(it, c);
}

void GridRegion::add_rect(GridCell from, GridCell to) {
    if (from.row > to.row || from.col > to.col || to.row >= rows_ || to.col >= cols_)
        throw GroupError("geo: cell out of range");
    for (uint32_t r = from.row; r <= to.row; ++r)
        for (uint32_t c = from.col; c <= to.col; ++c) cells_.push_back({r, c});
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

GridCell GridRegion::cell_at(double lon, double lat) const {
    if (!has_frame_) throw GroupError("geo: region has no frame");
    auto idx = [&](double v, double from, uint32_t limit) {
        double q = (v - from) / frame_.cell_deg + 1e-6;
        if (q < 0) throw GroupError("geo: point outside frame");
        auto i = static_cast<uint64_t>(q);
        if (i >= limit) throw GroupError("geo: point outside frame");
        return static_cast<uint32_t>(i);
    };
    return {idx(lon, frame_.lon_from, rows_), idx(lat, frame_.lat_from, cols_)};
}

void GridRegion::add_point(double lon, double lat) { add(cell_at(lon, lat)); }

namespace {

Scalar fresh_entry(const GroupContext& G, std::set<Bytes>& used, RandomSource& rng) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Scalar s = G.random_nonzero_scalar(rng);
        if (used.insert(s.encode()).second) return s;
    }
    throw GroupError("geo: distinct entry resampling exhausted");
}

std::pair<SparseLocationMatrix, ObfuscatedMatrix> encode_side(const GroupContext& G,
                                                              const GridRegion& reg,
                                                              RandomSource& rng,
                                                              MatrixRole role) {
    if (reg.empty()) throw GroupError("geo: empty region");
    const uint32_t m = reg.rows(), n = reg.cols();

    SparseLocationMatrix L;
    L.role = role;
    L.m = m;
    L.n = n;
    L.a.assign(size_t(m) * n, G.scalar_zero());
    std::set<Bytes> used;
    for (const GridCell& c : reg.cells()) L.a[size_t(c.row) * n + c.col] = fresh_entry(G, used, rng);

    std::vector<Scalar> mask(size_t(m) * n);
    for (auto& e : mask) e = G.random_nonzero_scalar(rng);

    ObfuscatedMatrix N;
    N.origin = role;
    N.n = n;
    N.a.assign(size_t(n) * n, G.scalar_zero());
    // Only the region's cells contribute terms to the transposed product.
    for (const GridCell& c : reg.cells()) {
        const Scalar& l = L.at(c.row, c.col);
        for (uint32_t j = 0; j < n; ++j) {
            const Scalar& w = mask[size_t(c.row) * n + j];
            if (role == MatrixRole::area) {
                Scalar& out = N.a[size_t(c.col) * n + j];  // N = L^T * M
                out = out.add(l.mul(w));
            } else {
                Scalar& out = N.a[size_t(j) * n + c.col];  // N~ = M~^T * L~
                out = out.add(w.mul(l));
            }
        }
    }
    return {std::move(L), std::move(N)};
}

}  // namespace

std::pair<SparseLocationMatrix, ObfuscatedMatrix> encode_region(const GroupContext& G,
                                                                const GridRegion& region,
                                                                RandomSource& rng) {
    return encode_side(G, region, rng, MatrixRole::area);
}

std::pair<SparseLocationMatrix, ObfuscatedMatrix> encode_user_route(const GroupContext& G,
                                                                    const GridRegion& route,
                                                                    RandomSource& rng) {
    return encode_side(G, route, rng, MatrixRole::user);
}

namespace {

void check_operands(const ObfuscatedMatrix& user, const ObfuscatedMatrix& area) {
    if (user.origin != MatrixRole::user || area.origin != MatrixRole::area)
        throw GroupError("geo: operand roles swapped");
    if (user.n != area.n || user.n == 0) throw GroupError("geo: dimension mismatch");
}

Scalar product_entry(const ObfuscatedMatrix& user, const ObfuscatedMatrix& area, uint32_t i,
                     uint32_t j) {
    Scalar acc = user.at(i, 0).mul(area.at(0, j));
    for (uint32_t k = 1; k < user.n; ++k) acc = acc.add(user.at(i, k).mul(area.at(k, j)));
    return acc;
}

}  // namespace

std::vector<Scalar> match_product(const ObfuscatedMatrix& user, const ObfuscatedMatrix& area) {
    check_operands(user, area);
    std::vector<Scalar> N;
    N.reserve(size_t(user.n) * user.n);
    for (uint32_t i = 0; i < user.n; ++i)
        for (uint32_t j = 0; j < user.n; ++j) N.push_back(product_entry(user, area, i, j));
    return N;
}

bool match(const ObfuscatedMatrix& user, const ObfuscatedMatrix& area) {
    check_operands(user, area);
    for (uint32_t i = 0; i < user.n; ++i)
        for (uint32_t j = 0; j < user.n; ++j)
            if (!product_entry(user, area, i, j).is_zero()) return true;
    return false;
}

std::vector<uint32_t> leakage_profile(const ObfuscatedMatrix& user, const ObfuscatedMatrix& area) {
    if (!match(user, area)) throw GroupError("geo: no match to profile");
    std::vector<uint32_t> cols;
    for (uint32_t k = 0; k < user.n; ++k) {
        bool in_user = false, in_area = false;
        for (uint32_t i = 0; i < user.n && !in_user; ++i) in_user = !user.at(i, k).is_zero();
        for (uint32_t j = 0; j < area.n && !in_area; ++j) in_area = !area.at(k, j).is_zero();
        if (in_user && in_area) cols.push_back(k);
    }
    return cols;
}

Bytes encode_matrix(const ObfuscatedMatrix& M) {
    if (M.n == 0 || M.n > 0xffff) throw GroupError("geo: dimension mismatch");
    Bytes out;
    out.push_back(uint8_t(M.n >> 8));
    out.push_back(uint8_t(M.n & 0xff));
    for (const Scalar& e : M.a) {
        Bytes enc = e.encode();
        out.insert(out.end(), enc.begin(), enc.end());
    }
    return out;
}

ObfuscatedMatrix decode_matrix(const GroupContext& G, const Bytes& in, MatrixRole origin) {
    if (in.size() < 2) throw GroupError("matrix: truncated");
    const uint32_t n = uint32_t(in[0]) << 8 | in[1];
    if (n == 0) throw GroupError("matrix: empty dimension");
    const size_t w = G.scalar_bytes();
    if (in.size() != 2 + size_t(n) * n * w) throw GroupError("matrix: length mismatch");
    ObfuscatedMatrix M;
    M.origin = origin;
    M.n = n;
    M.a.reserve(size_t(n) * n);
    for (size_t off = 2; off < in.size(); off += w)
        M.a.push_back(G.decode_scalar(Bytes(in.begin() + off, in.begin() + off + w)));
    return M;
}

}  // namespace mcs
