#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "elmkit/errors.hpp"

namespace elmkit {

/// Hidden-node nonlinearities. sigmoid/sine/relu/identity are additive
/// nodes; gaussian_rbf is a radial basis node whose hidden value is
/// exp(-(b * ||x - w||)^2). Enum values are stable: they are written to
/// model files.
enum class ActivationKind : std::uint32_t {
    sigmoid = 0,
    sine = 1,
    gaussian_rbf = 2,
    relu = 3,
    identity = 4,
};

constexpr bool is_rbf(ActivationKind k) { return k == ActivationKind::gaussian_rbf; }

inline const char* activation_name(ActivationKind k) {
    switch (k) {
        case ActivationKind::sigmoid: return "sigmoid";
        case ActivationKind::sine: return "sine";
        case ActivationKind::gaussian_rbf: return "rbf";
        case ActivationKind::relu: return "relu";
        case ActivationKind::identity: return "identity";
    }
    return "?";
}

inline ActivationKind activation_from_name(std::string_view name) {
    if (name == "sigmoid") return ActivationKind::sigmoid;
    if (name == "sine") return ActivationKind::sine;
    if (name == "rbf" || name == "gaussian_rbf") return ActivationKind::gaussian_rbf;
    if (name == "relu") return ActivationKind::relu;
    if (name == "identity") return ActivationKind::identity;
    throw ConfigError("unknown activation: " + std::string(name));
}

inline ActivationKind activation_from_id(std::uint32_t id) {
    if (id > 4) throw FormatError("unknown activation id: " + std::to_string(id));
    return ActivationKind(id);
}

/// Applies the activation elementwise in place. For gaussian_rbf the
/// argument is taken as the scaled distance u = b * ||x - w||, i.e. the
/// result is exp(-u^2).
inline void apply_activation(ActivationKind kind, Eigen::MatrixXd& z) {
    switch (kind) {
        case ActivationKind::sigmoid:
            z = z.array().logistic().matrix();
            break;
        case ActivationKind::sine:
            z = z.array().sin().matrix();
            break;
        case ActivationKind::gaussian_rbf:
            z = (-z.array().square()).exp().matrix();
            break;
        case ActivationKind::relu:
            z = z.cwiseMax(0.0);
            break;
        case ActivationKind::identity:
            break;
    }
}

}  // namespace elmkit
