#include "mcs/group.hpp"

#include "mcs/sha.hpp"

namespace mcs {

namespace {

thread_local OpCounts* g_counts = nullptr;

inline void count_point_mult() {
    if (g_counts) ++g_counts->point_mult;
}
inline void count_point_add() {
    if (g_counts) ++g_counts->point_add;
}
inline void count_bilinear_map() {
    if (g_counts) ++g_counts->bilinear_map;
}
inline void count_gt_exp() {
    if (g_counts) ++g_counts->gt_exp;
}

void require_same_ctx(const GroupContext* a, const GroupContext* b, const char* what) {
    if (!a || !b) throw GroupError(std::string("group: uninitialized element in ") + what);
    if (a != b) throw GroupError(std::string("group: mixed contexts in ") + what);
}

}  // namespace

const char* side_name(Side s) {
    switch (s) {
        case Side::left: return "left";
        case Side::right: return "right";
        case Side::both: return "both";
    }
    return "?";
}

bool side_admits(Side have, Side want) { return have == Side::both || have == want; }

Side side_meet(Side a, Side b) {
    if (a == b) return a;
    if (a == Side::both) return b;
    if (b == Side::both) return a;
    throw GroupError(std::string("group: incompatible slots ") + side_name(a) + " and " +
                     side_name(b));
}

OpCounts& OpCounts::operator+=(const OpCounts& o) {
    point_mult += o.point_mult;
    point_add += o.point_add;
    bilinear_map += o.bilinear_map;
    gt_exp += o.gt_exp;
    return *this;
}

CounterScope::CounterScope(OpCounts& sink) : prev_(g_counts) { g_counts = &sink; }
CounterScope::~CounterScope() { g_counts = prev_; }

// ---- Scalar ----

Scalar GroupContext::wrap(const Fe& v) const {
    Scalar s;
    s.G_ = this;
    s.v_ = v;
    return s;
}

Scalar Scalar::add(const Scalar& o) const {
    require_same_ctx(G_, o.G_, "scalar add");
    Fe r;
    fe_add(G_->scalar_field(), r, v_, o.v_);
    return G_->wrap(r);
}

Scalar Scalar::sub(const Scalar& o) const {
    require_same_ctx(G_, o.G_, "scalar sub");
    Fe r;
    fe_sub(G_->scalar_field(), r, v_, o.v_);
    return G_->wrap(r);
}

Scalar Scalar::mul(const Scalar& o) const {
    require_same_ctx(G_, o.G_, "scalar mul");
    Fe r;
    fe_mul(G_->scalar_field(), r, v_, o.v_);
    return G_->wrap(r);
}

Scalar Scalar::neg() const {
    if (!G_) throw GroupError("group: uninitialized scalar");
    Fe r;
    fe_neg(G_->scalar_field(), r, v_);
    return G_->wrap(r);
}

Scalar Scalar::inverse() const {
    if (!G_) throw GroupError("group: uninitialized scalar");
    if (is_zero()) throw GroupError("group: inverse of zero scalar");
    Fe r;
    fe_inv(G_->scalar_field(), r, v_);
    return G_->wrap(r);
}

bool Scalar::is_zero() const {
    if (!G_) throw GroupError("group: uninitialized scalar");
    return fe_is_zero(G_->scalar_field(), v_);
}

bool Scalar::equal(const Scalar& o) const {
    require_same_ctx(G_, o.G_, "scalar compare");
    return fe_equal(G_->scalar_field(), v_, o.v_);
}

Bytes Scalar::encode() const {
    if (!G_) throw GroupError("group: uninitialized scalar");
    Bytes out;
    fe_to_bytes(G_->scalar_field(), out, v_);
    return out;
}

Scalar GroupContext::scalar_zero() const {
    Fe z;
    mpn_zero(z.v.data(), P_.n);
    return wrap(z);
}

Scalar GroupContext::scalar_one() const { return wrap(P_.one); }

Scalar GroupContext::scalar_from_u64(uint64_t v) const {
    Fe r;
    fe_from_u64(P_, r, v);
    return wrap(r);
}

Scalar GroupContext::scalar_from_i64(int64_t v) const {
    if (v >= 0) return scalar_from_u64(uint64_t(v));
    return scalar_from_u64(uint64_t(-(v + 1)) + 1).neg();
}

int64_t GroupContext::scalar_to_i64(const Scalar& s) const {
    if (s.G_ != this) throw GroupError("group: scalar from another context");
    Limbs c = fe_canonical(P_, s.v_);
    const uint64_t limit = uint64_t(1) << 62;
    bool high_zero = true;
    for (int i = 1; i < P_.n; ++i)
        if (c[size_t(i)] != 0) high_zero = false;
    if (high_zero && c[0] <= limit) return int64_t(c[0]);
    // try p - v
    Limbs neg{};
    mpn_sub_n(neg.data(), P_.mod.data(), c.data(), P_.n);
    high_zero = true;
    for (int i = 1; i < P_.n; ++i)
        if (neg[size_t(i)] != 0) high_zero = false;
    if (high_zero && neg[0] <= limit) return -int64_t(neg[0]);
    throw GroupError("group: scalar magnitude exceeds signed range");
}

uint64_t GroupContext::scalar_to_u64(const Scalar& s) const {
    if (s.G_ != this) throw GroupError("group: scalar from another context");
    Limbs c = fe_canonical(P_, s.v_);
    for (int i = 1; i < P_.n; ++i)
        if (c[size_t(i)] != 0) throw GroupError("group: scalar exceeds u64 range");
    if (c[0] >= (uint64_t(1) << 63)) throw GroupError("group: scalar exceeds u64 range");
    return c[0];
}

Scalar GroupContext::random_scalar(RandomSource& rng) const {
    // Rejection sampling on bits(p)-wide candidates.
    Bytes buf(P_.bytes);
    unsigned topbits = P_.bits % 8;
    uint8_t mask = topbits ? uint8_t((1u << topbits) - 1) : 0xff;
    for (;;) {
        rng.fill(buf.data(), buf.size());
        buf[0] &= mask;
        Fe r;
        if (fe_from_bytes(P_, r, buf.data(), buf.size())) return wrap(r);
    }
}

Scalar GroupContext::random_nonzero_scalar(RandomSource& rng) const {
    for (;;) {
        Scalar s = random_scalar(rng);
        if (!s.is_zero()) return s;
    }
}

Scalar GroupContext::hash_to_scalar(std::string_view tag, const std::vector<Bytes>& parts) const {
    // Oversampling by 128 bits keeps the mod-p bias negligible.
    std::vector<const Bytes*> hp;
    hp.reserve(parts.size() + 1);
    hp.push_back(&cv_->r_be);
    for (const Bytes& b : parts) hp.push_back(&b);
    Bytes h = tagged_hash(tag, hp, P_.bytes + 16);
    mpz_t v, m;
    mpz_init(v);
    mpz_init(m);
    mpz_from_bytes(v, h.data(), h.size());
    mpz_import(m, size_t(P_.n), -1, sizeof(mp_limb_t), 0, 0, P_.mod.data());
    mpz_mod(v, v, m);
    Fe r;
    fe_from_mpz(P_, r, v);
    mpz_clear(v);
    mpz_clear(m);
    return wrap(r);
}

Scalar GroupContext::prf(const Scalar& key, const std::vector<Bytes>& parts) const {
    if (key.G_ != this) throw GroupError("group: PRF key from another context");
    if (key.is_zero()) throw GroupError("group: PRF key must be nonzero");
    std::vector<Bytes> all;
    all.reserve(parts.size() + 1);
    all.push_back(key.encode());
    for (const Bytes& b : parts) all.push_back(b);
    return hash_to_scalar("mcs/prf", all);
}

Scalar GroupContext::decode_scalar(const Bytes& enc) const {
    Fe r;
    if (!fe_from_bytes(P_, r, enc.data(), enc.size()))
        throw GroupError("group: malformed scalar encoding");
    return wrap(r);
}

// ---- SourceElement ----

SourceElement GroupContext::wrap(const EcA& p, Side s) const {
    SourceElement e;
    e.G_ = this;
    e.pt_ = p;
    e.side_ = s;
    return e;
}

bool SourceElement::is_identity() const {
    if (!G_) throw GroupError("group: uninitialized element");
    return pt_.inf;
}

bool SourceElement::equal(const SourceElement& o) const {
    require_same_ctx(G_, o.G_, "source compare");
    if (pt_.inf || o.pt_.inf) return pt_.inf == o.pt_.inf;
    const FpCtx& F = G_->cv_->F;
    return fe_equal(F, pt_.x, o.pt_.x) && fe_equal(F, pt_.y, o.pt_.y);
}

SourceElement SourceElement::mul(const SourceElement& o) const {
    require_same_ctx(G_, o.G_, "source mul");
    Side s = side_meet(side_, o.side_);
    count_point_add();
    const FpCtx& F = G_->cv_->F;
    EcJ a, r;
    ecj_from_affine(F, a, pt_);
    ec_add_mixed(F, r, a, o.pt_);
    EcA out;
    ec_normalize(F, out, r);
    return G_->wrap(out, s);
}

SourceElement SourceElement::exp(const Scalar& k) const {
    if (!G_) throw GroupError("group: uninitialized element");
    if (k.G_ != G_) throw GroupError("group: scalar from another context");
    count_point_mult();
    const FpCtx& F = G_->cv_->F;
    Limbs e = fe_canonical(G_->scalar_field(), k.v_);
    EcJ r;
    if (table_) {
        table_->mul(F, r, e.data(), G_->scalar_field().n);
    } else {
        EcJ a;
        ecj_from_affine(F, a, pt_);
        ec_mul(F, r, a, e.data(), G_->scalar_field().n);
    }
    EcA out;
    ec_normalize(F, out, r);
    return G_->wrap(out, side_);
}

SourceElement SourceElement::inverse() const {
    if (!G_) throw GroupError("group: uninitialized element");
    if (pt_.inf) return *this;
    EcA out = pt_;
    fe_neg(G_->cv_->F, out.y, pt_.y);
    return G_->wrap(out, side_);
}

SourceElement SourceElement::narrowed(Side s) const {
    if (!G_) throw GroupError("group: uninitialized element");
    if (!side_admits(side_, s))
        throw GroupError(std::string("group: cannot narrow ") + side_name(side_) + " to " +
                         side_name(s));
    SourceElement e = *this;
    e.side_ = s;
    return e;
}

Bytes SourceElement::encode() const {
    if (!G_) throw GroupError("group: uninitialized element");
    const FpCtx& F = G_->cv_->F;
    Bytes out;
    if (pt_.inf) {
        out.assign(F.bytes + 1, 0);
        return out;
    }
    fe_to_bytes(F, out, pt_.x);
    out.push_back(fe_canonical_is_odd(F, pt_.y) ? 0x03 : 0x02);
    return out;
}

SourceElement GroupContext::identity(Side s) const { return wrap(EcA{}, s); }

SourceElement GroupContext::hash_to_source(std::string_view tag, const std::vector<Bytes>& parts,
                                           Side s) const {
    EcA p = hash_to_point(*cv_, std::string(tag), parts);
    return wrap(p, s);
}

SourceElement GroupContext::generator(std::string_view tag, const std::vector<Bytes>& parts,
                                      Side s) const {
    SourceElement e = hash_to_source(tag, parts, s);
    auto tab = std::make_shared<FixedBaseTable>();
    tab->build(cv_->F, e.pt_, P_.bits);
    e.table_ = std::move(tab);
    return e;
}

SourceElement GroupContext::decode_source(const Bytes& enc, Side s) const {
    const FpCtx& F = cv_->F;
    if (enc.size() != F.bytes + 1) throw GroupError("group: source encoding has wrong length");
    uint8_t parity = enc.back();
    bool all_zero = true;
    for (size_t i = 0; i + 1 < enc.size(); ++i)
        if (enc[i]) all_zero = false;
    if (parity == 0x00) {
        if (!all_zero) throw GroupError("group: malformed identity encoding");
        return identity(s);
    }
    if (parity != 0x02 && parity != 0x03) throw GroupError("group: bad parity byte");
    EcA p;
    if (!fe_from_bytes(F, p.x, enc.data(), F.bytes))
        throw GroupError("group: source x out of range");
    Fe rhs;
    fe_sqr(F, rhs, p.x);
    fe_mul(F, rhs, rhs, p.x);
    fe_add(F, rhs, rhs, p.x);
    if (!fe_sqrt(F, p.y, rhs)) throw GroupError("group: source x not on the curve");
    if (fe_canonical_is_odd(F, p.y) != (parity == 0x03)) fe_neg(F, p.y, p.y);
    p.inf = false;
    if (!point_in_subgroup(*cv_, p)) throw GroupError("group: source point outside the subgroup");
    return wrap(p, s);
}

// ---- TargetElement ----

TargetElement GroupContext::wrap(const Fe2& v) const {
    TargetElement e;
    e.G_ = this;
    e.v_ = v;
    return e;
}

bool TargetElement::is_one() const {
    if (!G_) throw GroupError("group: uninitialized element");
    return fe2_is_one(G_->cv_->F, v_);
}

bool TargetElement::equal(const TargetElement& o) const {
    require_same_ctx(G_, o.G_, "target compare");
    return fe2_equal(G_->cv_->F, v_, o.v_);
}

TargetElement TargetElement::mul(const TargetElement& o) const {
    require_same_ctx(G_, o.G_, "target mul");
    Fe2 r;
    fe2_mul(G_->cv_->F, r, v_, o.v_);
    return G_->wrap(r);
}

TargetElement TargetElement::div(const TargetElement& o) const {
    require_same_ctx(G_, o.G_, "target div");
    Fe2 inv, r;
    fe2_inv(G_->cv_->F, inv, o.v_);
    fe2_mul(G_->cv_->F, r, v_, inv);
    return G_->wrap(r);
}

TargetElement TargetElement::exp(const Scalar& k) const {
    if (!G_) throw GroupError("group: uninitialized element");
    if (k.G_ != G_) throw GroupError("group: scalar from another context");
    count_gt_exp();
    Limbs e = fe_canonical(G_->scalar_field(), k.v_);
    Fe2 r;
    fe2_pow(G_->cv_->F, r, v_, e.data(), G_->scalar_field().n);
    return G_->wrap(r);
}

TargetElement TargetElement::inverse() const {
    if (!G_) throw GroupError("group: uninitialized element");
    Fe2 r;
    fe2_inv(G_->cv_->F, r, v_);
    return G_->wrap(r);
}

Bytes TargetElement::encode() const {
    if (!G_) throw GroupError("group: uninitialized element");
    Bytes out;
    fe2_to_bytes(G_->cv_->F, out, v_);
    return out;
}

TargetElement GroupContext::one() const {
    Fe2 v;
    fe2_set_one(cv_->F, v);
    return wrap(v);
}

TargetElement GroupContext::hash_to_gt(std::string_view tag,
                                       const std::vector<Bytes>& parts) const {
    Fe2 v;
    hash_to_target(*cv_, v, std::string(tag), parts);
    return wrap(v);
}

TargetElement GroupContext::decode_target(const Bytes& enc) const {
    Fe2 v;
    if (!fe2_from_bytes(cv_->F, v, enc.data(), enc.size()))
        throw GroupError("group: malformed target encoding");
    if (fe2_is_zero(cv_->F, v)) throw GroupError("group: zero is not a group element");
    return wrap(v);
}

bool GroupContext::in_subgroup(const TargetElement& z) const {
    if (z.G_ != this) throw GroupError("group: element from another context");
    return in_target_subgroup(*cv_, z.v_);
}

TargetElement GroupContext::pair(const SourceElement& a, const SourceElement& b) const {
    if (a.G_ != this || b.G_ != this) throw GroupError("group: element from another context");
    if (!side_admits(a.side_, Side::left))
        throw GroupError("group: left pairing slot requires a left-capable element");
    if (!side_admits(b.side_, Side::right))
        throw GroupError("group: right pairing slot requires a right-capable element");
    count_bilinear_map();
    Fe2 r;
    pairing(*cv_, r, a.pt_, b.pt_);
    return wrap(r);
}

// ---- GroupContext ----

const char* profile_name(Profile p) { return p == Profile::p160 ? "p160" : "p256"; }

Profile profile_from_name(const std::string& name) {
    if (name == "p160") return Profile::p160;
    if (name == "p256") return Profile::p256;
    throw GroupError("group: unknown profile " + name);
}

GroupContext::GroupContext(Profile profile)
    : profile_(profile), cv_(profile == Profile::p160 ? &curve_p160() : &curve_p256()) {
    P_.init_from_bytes(cv_->r_be);
}

}  // namespace mcs
