#ifndef ELCA_IO_HPP
#define ELCA_IO_HPP

#include <string>

#include <json.hpp>

#include "elca/em.hpp"
#include "elca/model.hpp"
#include "elca/selection.hpp"
#include "elca/sizedist.hpp"

namespace elca::io {

using Json = nlohmann::ordered_json;

// Parameter documents: {"vertex_labels", "pi", "tau", "a", "phi"} with phi as
// N rows of G values. Doubles are written in shortest round-trip form, so
// parse(dump(p)) == p bit for bit.
Json to_json(const ElcaParams& p);
ElcaParams params_from_json(const Json& doc);

// Accepts {"pi", "p"} or an ELCA document (converted with implied_lca).
LcaParams lca_params_from_json(const Json& doc);

// Parameter document plus loglik_trace, n_iter, converged, seed, 1-based
// z1/z2 and, optionally, responsibilities[j][g][k].
Json to_json(const FitResult& r, bool include_responsibilities);

Json to_json(const CvEstimate& e);
Json to_json(const CvSelection& s);
Json to_json(const MomentReport& r);

std::string dump(const Json& doc);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace elca::io

#endif  // ELCA_IO_HPP
