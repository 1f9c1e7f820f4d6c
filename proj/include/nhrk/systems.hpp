#pragma once

#include "nhrk/mechanics.hpp"
#include "nhrk/prk_lie.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nhrk {

using ParamMap = std::map<std::string, double>;

enum class SystemKind { vector, lie };

/// Initial data: configuration coordinates and velocities. For Lie systems the
/// coordinates are those understood by SystemCatalogEntry::element.
struct Preset {
    Vector q, v;
};

struct SystemCatalogEntry {
    std::string name;
    SystemKind kind = SystemKind::vector;
    ParamMap params;

    std::optional<VecNHSystem> vec;
    std::optional<PositionConstraint> vec_constraint;

    std::optional<LieNHSystem> lie;
    std::optional<LiePositionConstraint> lie_constraint;
    std::function<Matrix(const Vector&)> element;
    std::vector<std::string> coordinate_names;
    std::function<Vector(const Matrix&)> coordinates;

    std::map<std::string, Preset> presets;
    std::string default_preset = "default";

    std::vector<std::string> diagnostic_names;
    std::function<Vector(const Vector&, const Vector&)> vec_diagnostics;
    std::function<Vector(const Matrix&, const Vector&)> lie_diagnostics;

    const Preset& preset(const std::string& name = "") const;
    ExtendedState vec_state(const Preset& p) const;
    LieState lie_state(const Preset& p) const;
};

SystemCatalogEntry nonholonomic_particle(const ParamMap& overrides = {});
SystemCatalogEntry cvt(const ParamMap& overrides = {});
SystemCatalogEntry chaotic_system(int m = 3, const ParamMap& overrides = {});
SystemCatalogEntry unicycle(const ParamMap& overrides = {});
SystemCatalogEntry ball_on_turntable(const ParamMap& overrides = {});

/// Test fixtures.
SystemCatalogEntry harmonic_oscillator(const ParamMap& overrides = {});
SystemCatalogEntry planar_pendulum(const ParamMap& overrides = {});
SystemCatalogEntry rigid_body(const ParamMap& overrides = {});
SystemCatalogEntry so3_pendulum(const ParamMap& overrides = {});

/// Ensemble member j of J on the energy level 3.06.
Preset chaotic_initial_state(int m, int j, int J);

std::vector<std::string> catalog_names();
/// Looks a system up by name; `m` selects the chaotic dimension. Unknown
/// names or parameters raise InvalidArgument.
SystemCatalogEntry make_system(const std::string& name, const ParamMap& overrides = {});

} // namespace nhrk
