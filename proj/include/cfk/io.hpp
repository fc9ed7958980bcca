#pragma once

// JSON documents for complexes and flip maps.  A document stores only the
// field, the generators with their bigradings, and bare field coefficients
// for arrows and flip entries; U/V powers never appear on disk because they
// are forced by the gradings.  parse_complex re-derives and re-checks
// everything, so a hand-edited document cannot smuggle in an inconsistent
// complex.

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cfk/complex.hpp"
#include "cfk/errors.hpp"
#include "cfk/flip.hpp"
#include "cfk/homology.hpp"
#include "cfk/surgery.hpp"

namespace cfk {

using json = nlohmann::ordered_json;

struct ComplexDocument {
  BigradedComplex complex;
  std::optional<FlipMap> flip;
  json metadata;  // free-form, carried through untouched

  bool operator==(const ComplexDocument& o) const {
    return complex.p == o.complex.p &&
           [&] {
             if (complex.gens.size() != o.complex.gens.size()) return false;
             for (size_t i = 0; i < complex.gens.size(); ++i)
               if (complex.gens[i].name != o.complex.gens[i].name ||
                   !(complex.gens[i].gr == o.complex.gens[i].gr))
                 return false;
             return true;
           }() &&
           complex.d == o.complex.d && complex.truncation == o.complex.truncation &&
           flip.has_value() == o.flip.has_value() && (!flip || *flip == *o.flip) &&
           metadata == o.metadata;
  }
};

namespace iodetail {

inline bool is_prime(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Line/column of a byte offset, for pointing at JSON syntax errors.
inline std::pair<int, int> line_of(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline long long require_int(const json& j, const std::string& where) {
  if (!j.is_number_integer())
    throw ParseError(where + ": expected an integer, got " + std::string(j.type_name()));
  return j.get<long long>();
}

inline std::string require_string(const json& j, const std::string& where) {
  if (!j.is_string())
    throw ParseError(where + ": expected a string, got " + std::string(j.type_name()));
  return j.get<std::string>();
}

}  // namespace iodetail

// Reads a complex document.  `default_p` is used when the document does not
// declare a field.  Throws ParseError for malformed or ill-typed documents
// (with line/column for syntax errors), and the usual typed errors for
// semantically bad data: ParityError for grading-incompatible arrows,
// NotChainMap when d^2 != 0 or the flip fails to commute, BadFlip when the
// flip is not filtered or not a homology isomorphism.
inline ComplexDocument parse_complex(const std::string& text, uint32_t default_p = 2) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = iodetail::line_of(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                     ": " + e.what());
  }
  if (!j.is_object()) throw ParseError("document root must be a JSON object");

  ComplexDocument doc;
  uint32_t p = default_p;
  if (const json* f = iodetail::find(j, "field")) {
    if (!f->is_object() || !f->contains("p"))
      throw ParseError("field: expected an object with a key \"p\"");
    long long pv = iodetail::require_int((*f)["p"], "field.p");
    if (pv < 2 || pv > 1000003 || !iodetail::is_prime(static_cast<uint32_t>(pv)))
      throw ParseError("field.p: " + std::to_string(pv) + " is not a supported prime");
    p = static_cast<uint32_t>(pv);
  }
  doc.complex = BigradedComplex(p);

  const json* gens = iodetail::find(j, "generators");
  if (!gens) throw ParseError("missing \"generators\" array");
  if (!gens->is_array()) throw ParseError("generators: expected an array");
  for (size_t i = 0; i < gens->size(); ++i) {
    const json& g = (*gens)[i];
    std::string where = "generators[" + std::to_string(i) + "]";
    if (!g.is_object()) throw ParseError(where + ": expected an object");
    if (!g.contains("name") || !g.contains("gr_w") || !g.contains("gr_z"))
      throw ParseError(where + ": needs name, gr_w and gr_z");
    Generator gen;
    gen.name = iodetail::require_string(g["name"], where + ".name");
    if (gen.name.empty()) throw ParseError(where + ".name: must be nonempty");
    gen.gr.gr_w = static_cast<int>(iodetail::require_int(g["gr_w"], where + ".gr_w"));
    gen.gr.gr_z = static_cast<int>(iodetail::require_int(g["gr_z"], where + ".gr_z"));
    for (auto& prev : doc.complex.gens)
      if (prev.name == gen.name) throw ParseError(where + ": duplicate generator " + gen.name);
    if ((((gen.gr.gr_w - gen.gr.gr_z) % 2) + 2) % 2 != 0)
      throw ParityError(where + ": gradings of " + gen.name + " disagree mod 2");
    doc.complex.gens.push_back(gen);
  }

  if (const json* t = iodetail::find(j, "truncation")) {
    long long n = iodetail::require_int(*t, "truncation");
    if (n < 1) throw ParseError("truncation: must be a positive order");
    doc.complex.truncation = static_cast<int>(n);
  }

  if (const json* diff = iodetail::find(j, "differential")) {
    if (!diff->is_array()) throw ParseError("differential: expected an array");
    for (size_t i = 0; i < diff->size(); ++i) {
      const json& a = (*diff)[i];
      std::string where = "differential[" + std::to_string(i) + "]";
      if (!a.is_object() || !a.contains("from") || !a.contains("to") || !a.contains("coeff"))
        throw ParseError(where + ": needs from, to and coeff");
      std::string from = iodetail::require_string(a["from"], where + ".from");
      std::string to = iodetail::require_string(a["to"], where + ".to");
      FieldElem c(iodetail::require_int(a["coeff"], where + ".coeff"), p);
      int fi, ti;
      try {
        fi = doc.complex.index_of(from);
        ti = doc.complex.index_of(to);
      } catch (const DomainError&) {
        throw ParseError(where + ": unknown generator in arrow " + from + " -> " + to);
      }
      if (c.is_zero()) continue;
      try {
        doc.complex.add_entry(fi, ti, c);
      } catch (const ParityError& e) {
        throw ParityError(where + ": " + e.what());
      }
    }
  }

  auto rep = doc.complex.validate();
  if (!rep.ok()) {
    if (!rep.grading_violations.empty())
      throw ParityError("document invalid: " + rep.grading_violations.front().what);
    throw NotChainMap("differential does not satisfy d(d(x)) = 0: " +
                      rep.d2_failures.front().what);
  }

  if (const json* flip = iodetail::find(j, "flip")) {
    if (!flip->is_array()) throw ParseError("flip: expected an array");
    FlipMap psi(p);
    for (size_t i = 0; i < flip->size(); ++i) {
      const json& a = (*flip)[i];
      std::string where = "flip[" + std::to_string(i) + "]";
      if (!a.is_object() || !a.contains("from") || !a.contains("to") || !a.contains("coeff"))
        throw ParseError(where + ": needs from, to and coeff");
      std::string from = iodetail::require_string(a["from"], where + ".from");
      std::string to = iodetail::require_string(a["to"], where + ".to");
      FieldElem c(iodetail::require_int(a["coeff"], where + ".coeff"), p);
      int fi, ti;
      try {
        fi = doc.complex.index_of(from);
        ti = doc.complex.index_of(to);
      } catch (const DomainError&) {
        throw ParseError(where + ": unknown generator in flip entry " + from + " -> " + to);
      }
      if (c.is_zero()) continue;
      if (!flip_entry_exponents(doc.complex, fi, ti))
        throw BadFlip(where + ": entry " + from + " -> " + to + " is not flip-filtered");
      psi.add_entry(fi, ti, c);
    }
    validate_flip(doc.complex, psi);
    // The fold of the flip between the reduced directional complexes must be
    // an isomorphism; a non-square or non-unit-determinant fold cannot induce
    // one on homology.
    FWReduction rh = reduce_fw(directional_complex(doc.complex, Direction::horizontal, false));
    FWReduction rv = reduce_fw(directional_complex(doc.complex, Direction::vertical, false));
    surgdetail::Mat fold = surgdetail::flip_between_reductions(doc.complex, psi, rh, rv);
    if (rh.complex.size() != rv.complex.size())
      throw BadFlip("flip cannot induce an isomorphism: directional homologies differ in rank");
    WPoly det = surgdetail::poly_det(fold, p);
    if (det.is_zero() || !det.is_unit())
      throw BadFlip("flip does not induce an isomorphism from horizontal to vertical homology");
    doc.flip = std::move(psi);
  }

  if (const json* meta = iodetail::find(j, "metadata")) doc.metadata = *meta;
  return doc;
}

inline json complex_to_json(const ComplexDocument& doc) {
  json j;
  j["field"] = {{"p", doc.complex.p}};
  json gens = json::array();
  for (auto& g : doc.complex.gens)
    gens.push_back({{"name", g.name}, {"gr_w", g.gr.gr_w}, {"gr_z", g.gr.gr_z}});
  j["generators"] = std::move(gens);
  if (doc.complex.truncation) j["truncation"] = *doc.complex.truncation;
  json diff = json::array();
  for (auto& [ij, c] : doc.complex.d)  // std::map order: deterministic
    diff.push_back({{"from", doc.complex.gens[ij.first].name},
                    {"to", doc.complex.gens[ij.second].name},
                    {"coeff", c.value()}});
  j["differential"] = std::move(diff);
  if (doc.flip) {
    json flip = json::array();
    for (auto& [ij, c] : doc.flip->c)
      flip.push_back({{"from", doc.complex.gens[ij.first].name},
                      {"to", doc.complex.gens[ij.second].name},
                      {"coeff", c.value()}});
    j["flip"] = std::move(flip);
  }
  if (!doc.metadata.is_null()) j["metadata"] = doc.metadata;
  return j;
}

inline std::string serialize_complex(const ComplexDocument& doc) {
  return complex_to_json(doc).dump(2) + "\n";
}

inline json module_to_json(const FWModule& m) {
  return json{{"free_rank", m.free_rank}, {"torsion", m.torsion}};
}

// "F[W] ⊕ F[W]/W ⊕ F[W]/W^2", or "0" for the trivial module.
inline std::string module_structure(const FWModule& m) {
  std::string s;
  auto add = [&](const std::string& part) {
    if (!s.empty()) s += " ⊕ ";
    s += part;
  };
  for (int i = 0; i < m.free_rank; ++i) add("F[W]");
  for (int k : m.torsion) add(k == 1 ? std::string("F[W]/W") : "F[W]/W^" + std::to_string(k));
  return s.empty() ? "0" : s;
}

}  // namespace cfk
