#pragma once

#include "brwre/config.hpp"
#include "brwre/report.hpp"

namespace brwre {

/// Library version string, also recorded in report provenance.
const char* version();

/// Runs one experiment. The report payload depends only on the configuration and seed.
SimulationReport run(const ExperimentConfig& config);

}  // namespace brwre
