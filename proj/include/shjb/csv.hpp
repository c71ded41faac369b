#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "shjb/envelopes.hpp"
#include "shjb/odebench.hpp"
#include "shjb/pdesolver.hpp"
#include "shjb/simulator.hpp"
#include "shjb/verify.hpp"

namespace shjb {

/// Shortest round-trip text for a double (17 significant digits).
std::string format_g17(double x);

// All writers emit a header row and LF line endings.

/// t,y,v,w
void write_surface_csv(std::ostream& os, const ValueSurface& surface);
/// Inverse of write_surface_csv; the model supplies T and the fingerprint.
ValueSurface read_surface_csv(std::istream& is, const ModelSpec& model);

/// t,y,v,check_v,hat_v,in_sandwich over the nodes of the delta window.
void write_envelope_csv(std::ostream& os, const ValueSurface& surface, const ModelSpec& model,
                        const SupNorms& norms, double allowance = 1e-2);

/// t,a
void write_ode_csv(std::ostream& os, const OdeTable& table);

/// path_id,s,y,x,xi,mu,jump,cost_cum
void write_paths_csv(std::ostream& os, const std::vector<std::pair<int, PathSample>>& paths);

/// label,mean,stderr,n_paths,seed
void write_estimates_csv(std::ostream& os, const std::vector<std::pair<std::string, CostEstimate>>& rows);

/// check,measured,threshold,pass,seed,runtime_ms
void write_report_csv(std::ostream& os, const std::vector<CheckResult>& checks);

}  // namespace shjb
