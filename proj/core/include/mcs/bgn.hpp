#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "mcs/pairing.hpp"
#include "mcs/rng.hpp"

namespace mcs {

struct BgnError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class BgnLevel : uint8_t { source = 0, target = 1 };

/* Additively homomorphic ciphertext.  One pairing moves a pair of source
 * ciphertexts to the target level (multiplying the plaintexts once); after
 * that only additions remain. */
struct BgnCiphertext {
    BgnLevel level = BgnLevel::source;
    EcA p;   // meaningful at source level
    Fe2 z;   // meaningful at target level
};

/* Composite-order pairing parameters for the circle-matching extension.
 * The subgroup order n = q1*q2 is public, q1 is the decryption key:
 * raising a ciphertext to q1 kills the order-q1 blinding component and
 * leaves a small discrete log.  The test profile (lambda <= 32 bits) is
 * nowhere near a secure size: a 64-bit n factors on a desk calculator, so
 * these parameters exercise the algebra, not the hardness assumption. */
class BgnParams {
public:
    const Curve& curve() const { return core_->cv; }
    uint64_t n() const { return core_->n; }
    uint64_t max_value() const { return core_->m_max; }
    // Largest decryptable magnitude, 2 * max_value^2 (a squared distance).
    uint64_t bound() const { return core_->bound; }
    const EcA& l() const { return core_->l; }
    const EcA& l1() const { return core_->l1; }

    bool has_secret() const { return sec_ != nullptr; }
    uint64_t q1() const;  // throws without the secret part
    uint64_t q2() const;

    // Copy safe to hand to the provider and customers.
    BgnParams public_part() const;

private:
    struct EcTable {
        uint64_t steps = 0;
        std::unordered_map<std::string, uint32_t> baby;
        EcA base, giant;  // giant = [-steps] base
    };
    struct GtTable {
        uint64_t steps = 0;
        std::unordered_map<std::string, uint32_t> baby;
        Fe2 base, giant;
    };
    struct Core {
        Curve cv;
        uint64_t n = 0, m_max = 0, bound = 0;
        EcA l, l1;
    };
    struct Secret {
        uint64_t q1 = 0, q2 = 0;
        EcTable ec;  // base [q1] l, for source-level ciphertexts
        GtTable gt;  // base e(l,l)^q1, for target-level ciphertexts
    };

    std::shared_ptr<const Core> core_;
    std::shared_ptr<const Secret> sec_;

    friend BgnParams bgn_setup(unsigned, uint64_t, RandomSource&);
    friend int64_t bgn_decrypt(const BgnParams&, const BgnCiphertext&);
};

/* Generates lambda-bit primes q1, q2, builds the composite-order curve and
 * the bounded discrete-log tables (baby-step giant-step, sized to the
 * decryption bound 2 * m_max^2).  Requires 2 * (2*m_max^2) < q1, q2 so
 * decrypted residues identify plaintexts in the symmetric range. */
BgnParams bgn_setup(unsigned lambda_bits, uint64_t m_max, RandomSource& rng);

// c = [value] l + [r] l1 with fresh r; value must lie in [0, max_value].
BgnCiphertext bgn_encrypt(const BgnParams& pp, uint64_t value, RandomSource& rng);

// Plaintext addition / subtraction; operands must share a level.
BgnCiphertext bgn_add(const BgnParams& pp, const BgnCiphertext& a, const BgnCiphertext& b);
BgnCiphertext bgn_sub(const BgnParams& pp, const BgnCiphertext& a, const BgnCiphertext& b);

/* Squared distance between the encrypted center (Cx, Cy) and the encrypted
 * user position (Ux, Uy): pairs each coordinate difference with itself and
 * multiplies, yielding a target-level ciphertext of dx^2 + dy^2. */
BgnCiphertext bgn_distance_ct(const BgnParams& pp, const BgnCiphertext& Cx,
                              const BgnCiphertext& Cy, const BgnCiphertext& Ux,
                              const BgnCiphertext& Uy);

/* Recovers the plaintext in the symmetric range [-bound, bound]; requires
 * the secret part.  Throws BgnError when the discrete log falls outside
 * the configured bound. */
int64_t bgn_decrypt(const BgnParams& pp, const BgnCiphertext& c);

/* Containment decision on decrypted values: d^2 < R^2, boundary excluded.
 * Zp must be target-level (the squared distance), CR source-level (the
 * encrypted radius). */
bool bgn_decide(const BgnParams& pp, const BgnCiphertext& Zp, const BgnCiphertext& CR);

// Fixed-width wire form with a leading level byte; decode validates group
// membership at the matching level.
Bytes bgn_encode(const BgnParams& pp, const BgnCiphertext& c);
BgnCiphertext bgn_decode(const BgnParams& pp, const Bytes& in);

}  // namespace mcs
