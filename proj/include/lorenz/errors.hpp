#ifndef LORENZ_ERRORS_HPP
#define LORENZ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lorenz {

struct NonFiniteState : std::runtime_error {
    explicit NonFiniteState(const std::string& msg) : std::runtime_error(msg) {}
};

struct SequenceTooShort : std::runtime_error {
    explicit SequenceTooShort(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateFeature : std::runtime_error {
    explicit DegenerateFeature(const std::string& msg) : std::runtime_error(msg) {}
};

struct MissingStats : std::runtime_error {
    explicit MissingStats(const std::string& msg) : std::runtime_error(msg) {}
};

struct LengthMismatch : std::runtime_error {
    explicit LengthMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct AllUndefined : std::runtime_error {
    explicit AllUndefined(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalDivergence : std::runtime_error {
    explicit NumericalDivergence(const std::string& msg) : std::runtime_error(msg) {}
};

struct PreprocessingMismatch : std::runtime_error {
    explicit PreprocessingMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidConfig : std::runtime_error {
    explicit InvalidConfig(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lorenz

#endif
