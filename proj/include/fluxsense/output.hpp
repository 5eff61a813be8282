#pragma once

#include <filesystem>
#include <ostream>
#include <string>

namespace fluxsense {

struct ExperimentResult;
struct ForwardDump;
struct PosteriorEnsemble;

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

// round,iteration,xi_1..xi_p,misfit,accepted
void write_trace_csv(std::ostream &out, const PosteriorEnsemble &ensemble,
                     int round, bool header);

// Writes trace.csv, sensors.csv, flux_variance.csv, shape_samples.csv and
// summary.json (all deterministic under a fixed seed) plus timing.json with
// wall-clock numbers.
void write_bundle(const ExperimentResult &result,
                  const std::filesystem::path &dir);

// flux.csv (time, flux_0..flux_{n-1} per step) and field.csv (r,theta,u at
// the final time).
void write_forward_dump(const ForwardDump &dump,
                        const std::filesystem::path &dir);

} // namespace fluxsense
