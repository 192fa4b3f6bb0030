#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcs/pairing.hpp"
#include "mcs/rng.hpp"

namespace mcs {

struct GroupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* The construction is symmetric (G1 = G2), but the scheme is written for an
 * asymmetric interface: some elements may only enter the left pairing slot,
 * some only the right.  Each element carries a compile-time-opaque tag and
 * the operations enforce slot discipline, so code written against this API
 * would still typecheck over a genuinely asymmetric instantiation. */
enum class Side : uint8_t { left, right, both };

const char* side_name(Side s);
bool side_admits(Side have, Side want);
// Intersection of capabilities; throws GroupError when empty.
Side side_meet(Side a, Side b);

/* Abstract-operation tally. Only API-level operations count: internal
 * windowing, subgroup checks and encodings are free. */
struct OpCounts {
    uint64_t point_mult = 0;    // source-group exponentiation
    uint64_t point_add = 0;     // source-group multiplication
    uint64_t bilinear_map = 0;  // pairing evaluation
    uint64_t gt_exp = 0;        // target-group exponentiation

    OpCounts& operator+=(const OpCounts& o);
    bool operator==(const OpCounts& o) const = default;
};

// Routes counted operations on this thread into `sink` until destruction.
// Scopes nest; the innermost active scope receives the counts.
class CounterScope {
public:
    explicit CounterScope(OpCounts& sink);
    ~CounterScope();
    CounterScope(const CounterScope&) = delete;
    CounterScope& operator=(const CounterScope&) = delete;

private:
    OpCounts* prev_;
};

class GroupContext;

class Scalar {
public:
    Scalar() = default;

    Scalar add(const Scalar& o) const;
    Scalar sub(const Scalar& o) const;
    Scalar mul(const Scalar& o) const;
    Scalar neg() const;
    Scalar inverse() const;  // throws GroupError on zero
    bool is_zero() const;
    bool equal(const Scalar& o) const;

    Bytes encode() const;  // fixed-width big-endian canonical residue

private:
    friend class GroupContext;
    friend class SourceElement;
    friend class TargetElement;
    const GroupContext* G_ = nullptr;
    Fe v_;
};

class SourceElement {
public:
    SourceElement() = default;

    Side side() const { return side_; }
    bool is_identity() const;
    bool equal(const SourceElement& o) const;

    SourceElement mul(const SourceElement& o) const;  // counted: point_add
    SourceElement exp(const Scalar& k) const;         // counted: point_mult
    SourceElement inverse() const;
    // Restricts a `both` element to one slot; throws when incompatible.
    SourceElement narrowed(Side s) const;

    Bytes encode() const;  // x coordinate + parity byte; side is not serialized

private:
    friend class GroupContext;
    const GroupContext* G_ = nullptr;
    EcA pt_;
    Side side_ = Side::both;
    std::shared_ptr<const FixedBaseTable> table_;  // set on derived generators
};

class TargetElement {
public:
    TargetElement() = default;

    bool is_one() const;
    bool equal(const TargetElement& o) const;

    TargetElement mul(const TargetElement& o) const;
    TargetElement div(const TargetElement& o) const;
    TargetElement exp(const Scalar& k) const;  // counted: gt_exp
    TargetElement inverse() const;

    Bytes encode() const;  // both F_q^2 coefficients, big-endian

private:
    friend class GroupContext;
    const GroupContext* G_ = nullptr;
    Fe2 v_;
};

enum class Profile { p160, p256 };

const char* profile_name(Profile p);
Profile profile_from_name(const std::string& name);

/* Pairing groups of prime order p plus the scalar field Z_p, with canonical
 * encodings, domain-separated hashing, and the abstract-operation counters.
 * Wraps one of the cached profile curves; cheap to copy by reference,
 * expensive to build (field contexts only, the curve itself is shared). */
class GroupContext {
public:
    explicit GroupContext(Profile profile);

    Profile profile() const { return profile_; }
    const Curve& curve() const { return *cv_; }
    const FpCtx& scalar_field() const { return P_; }

    size_t source_bytes() const { return cv_->F.bytes + 1; }
    size_t target_bytes() const { return 2 * cv_->F.bytes; }
    size_t scalar_bytes() const { return P_.bytes; }
    unsigned scalar_bits() const { return P_.bits; }
    const Bytes& order_bytes() const { return cv_->r_be; }

    // -- scalars --
    Scalar scalar_zero() const;
    Scalar scalar_one() const;
    Scalar scalar_from_u64(uint64_t v) const;
    Scalar scalar_from_i64(int64_t v) const;  // negative maps to p - |v|
    /* Signed reading of residues with small magnitude (|v| <= 2^62);
     * throws GroupError otherwise.  Lets credit bookkeeping stay exact. */
    int64_t scalar_to_i64(const Scalar& s) const;
    uint64_t scalar_to_u64(const Scalar& s) const;  // throws if >= 2^63
    Scalar random_scalar(RandomSource& rng) const;
    Scalar random_nonzero_scalar(RandomSource& rng) const;
    Scalar hash_to_scalar(std::string_view tag, const std::vector<Bytes>& parts) const;
    /* Keyed PRF into Z_p; the key must be nonzero. */
    Scalar prf(const Scalar& key, const std::vector<Bytes>& parts) const;
    Scalar decode_scalar(const Bytes& enc) const;

    // -- source group --
    SourceElement identity(Side s) const;
    /* Derives a generator by hashing and equips it with a fixed-base table;
     * use for long-lived bases that get exponentiated repeatedly. */
    SourceElement generator(std::string_view tag, const std::vector<Bytes>& parts, Side s) const;
    SourceElement hash_to_source(std::string_view tag, const std::vector<Bytes>& parts,
                                 Side s) const;
    SourceElement decode_source(const Bytes& enc, Side s) const;

    // -- target group --
    TargetElement one() const;
    TargetElement hash_to_gt(std::string_view tag, const std::vector<Bytes>& parts) const;
    /* General F_q^2 decoding: message-space values may live outside the
     * order-p subgroup, so no membership test here. */
    TargetElement decode_target(const Bytes& enc) const;
    bool in_subgroup(const TargetElement& z) const;

    // counted: bilinear_map; first argument must admit the left slot, second
    // the right.
    TargetElement pair(const SourceElement& a, const SourceElement& b) const;

private:
    friend class Scalar;
    friend class SourceElement;
    friend class TargetElement;

    Scalar wrap(const Fe& v) const;
    SourceElement wrap(const EcA& p, Side s) const;
    TargetElement wrap(const Fe2& v) const;

    Profile profile_;
    const Curve* cv_;
    FpCtx P_;  // scalar field Z_p
};

}  // namespace mcs
