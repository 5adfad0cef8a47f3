#pragma once

#include <string>

#include "preshock/analysis.hpp"
#include "preshock/config.hpp"
#include "preshock/diagnostics.hpp"
#include "preshock/flow.hpp"

namespace preshock {

/// Run-directory layout:
///   manifest.json             config echo, stop info, schema version
///   monitors.csv              per-step series
///   snapshots/snap_NNNNNN.csv theta,w,z,k,a,eta,psi,phi,eta_x
///   snapshots/flow_NNNNNN.csv label-side fields and accumulators
///   reports/blowup.json, cusp.json, envelopes.json, residuals.json
///   reports/cusp_profile_<f>.csv
/// Numbers are written with shortest-round-trip formatting so that offline
/// re-analysis is bit-identical to the in-run reports.
void write_run_directory(const std::string& dir, const RunConfig& cfg, const Trajectory& traj);

Trajectory load_run_directory(const std::string& dir, RunConfig* cfg_out = nullptr);

void write_blowup_report(const std::string& path, const RunConfig& cfg, const BlowupReport& rep,
                         const EtaXStructure* structure = nullptr);
void write_cusp_report(const std::string& path, const RunConfig& cfg, const CuspExpansion& cusp,
                       const HolderFit* holder = nullptr);
void write_envelope_report(const std::string& path, const RunConfig& cfg,
                           const EnvelopeReport& rep);
void write_residual_report(const std::string& path, const RunConfig& cfg,
                           const std::vector<ResidualSeries>& duhamel,
                           const std::vector<IdentityResidual>& identities);
void write_error_profiles(const std::string& dir, const std::vector<ErrorProfile>& profiles);

/// Round-trip-exact number formatting used by every CSV/JSON writer.
std::string format_double(double v);

}  // namespace preshock
