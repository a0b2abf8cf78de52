#ifndef QLAP_VERIFY_HPP
#define QLAP_VERIFY_HPP

#include <string>
#include <vector>

namespace qlap {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Cross-module invariant suite behind `qlap verify`: exponent identities,
/// quadrature exactness and linearity, scaling laws, fiber closed forms,
/// gradient exactness, descent sanity, and first-integral monotonicity.
/// quick = true trims sample counts to keep the run under a minute.
std::vector<CheckResult> run_verification(bool quick);

} // namespace qlap

#endif
