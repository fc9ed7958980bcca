#pragma once

// Command-line surface.  main() is a thin wrapper around run_cli so the
// whole surface can be driven in-process by tests with captured streams.
//
// Exit codes: 0 ok, 1 domain error (bad document, bad slope, ...),
// 2 usage error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "cfk/io.hpp"
#include "cfk/surgery.hpp"

namespace cfk {
namespace clidetail {

inline std::string read_input(const std::string& path, std::istream& in) {
  if (path == "-") {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Slope {
  long long p = 0;
  long long q = 1;
};

// Accepts "3", "-1", "p/q" with a nonzero denominator; the sign is
// normalized onto the numerator.
inline Slope parse_slope(const std::string& s) {
  Slope out;
  size_t slash = s.find('/');
  try {
    size_t used = 0;
    out.p = std::stoll(s.substr(0, slash), &used);
    if (used != (slash == std::string::npos ? s.size() : slash)) throw std::invalid_argument(s);
    if (slash != std::string::npos) {
      out.q = std::stoll(s.substr(slash + 1), &used);
      if (used != s.size() - slash - 1) throw std::invalid_argument(s);
    }
  } catch (const std::exception&) {
    throw ParseError("slope: expected an integer or p/q, got \"" + s + "\"");
  }
  if (out.q == 0) throw ParseError("slope: denominator must be nonzero");
  if (out.q < 0) {
    out.p = -out.p;
    out.q = -out.q;
  }
  return out;
}

inline const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const ParityError*>(&e)) return "parity";
  if (dynamic_cast<const NotChainMap*>(&e)) return "not-chain-map";
  if (dynamic_cast<const BadFlip*>(&e)) return "bad-flip";
  if (dynamic_cast<const TruncationError*>(&e)) return "truncation";
  if (dynamic_cast<const NotZGradable*>(&e)) return "not-z-gradable";
  if (dynamic_cast<const AdmissibilityBudgetExceeded*>(&e)) return "budget";
  if (dynamic_cast<const Corrupt*>(&e)) return "corrupt";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  return "internal";
}

inline std::string monomial(int a, int b) {
  std::string s;
  if (a == 1)
    s += "U";
  else if (a > 1)
    s += "U^" + std::to_string(a);
  if (b == 1)
    s += "V";
  else if (b > 1)
    s += "V^" + std::to_string(b);
  return s;
}

// Applies a truncation order to an already-parsed document, discarding the
// entries the ideal (UV)^n kills.
inline void truncate_document(ComplexDocument& doc, int n) {
  doc.complex.truncation = n;
  std::erase_if(doc.complex.d, [&](const auto& kv) {
    return !doc.complex.arrow_exponents(kv.first.first, kv.first.second);
  });
  if (doc.flip)
    std::erase_if(doc.flip->c, [&](const auto& kv) {
      return !flip_entry_exponents(doc.complex, kv.first.first, kv.first.second);
    });
}

inline void print_complex(std::ostream& out, const BigradedComplex& c, const std::string& indent) {
  for (auto& g : c.gens)
    out << indent << g.name << "  (gr_w, gr_z) = (" << g.gr.gr_w << ", " << g.gr.gr_z
        << "), A = " << g.gr.alexander() << "\n";
  for (auto& [ij, coeff] : c.d) {
    auto e = c.arrow_exponents(ij.first, ij.second);
    std::string mono = monomial(e->first, e->second);
    out << indent << "d(" << c.gens[ij.first].name << ") += " << coeff.value()
        << (mono.empty() ? "" : " ") << mono << " " << c.gens[ij.second].name << "\n";
  }
}

}  // namespace clidetail

inline int run_cli(std::vector<std::string> args, std::istream& in, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"knot Floer complexes as decorated immersed curves"};
  app.name("cfkcurves");
  app.require_subcommand(1);
  app.set_config("--config", "", "read default options from an INI file");

  uint32_t default_field = 2;
  bool as_json = false;
  int truncation = 0;
  app.add_option("--field", default_field,
                 "field characteristic for documents that do not declare one")
      ->envname("CFK_FIELD")
      ->check(CLI::PositiveNumber);
  app.add_flag("--json", as_json, "machine-readable output");
  app.add_option("--truncation", truncation, "work over R_n = F[U,V]/(UV)^n")
      ->check(CLI::PositiveNumber);

  std::string file;
  std::string slope_text;
  long long spin_c = -1;
  int window = 0;
  long long dual_n = 0;

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a complex document");
  validate->add_option("file", file, "document path, or - for stdin")->required();

  CLI::App* reduce = app.add_subcommand("reduce", "cancel all unit arrows and reprint");
  reduce->add_option("file", file, "document path, or - for stdin")->required();

  CLI::App* surgery =
      app.add_subcommand("surgery", "HF^- of a rational surgery via the mapping cone");
  surgery->add_option("file", file, "document path, or - for stdin")->required();
  surgery->add_option("--slope", slope_text, "surgery slope p/q")->required();
  surgery->add_option("--spin-c", spin_c, "restrict to one spin-c class (0 <= i < |p|)");
  surgery->add_option("--N", window, "truncation window override")->check(CLI::PositiveNumber);

  CLI::App* dual =
      app.add_subcommand("dual-knot", "complex of the dual knot in an integer surgery");
  dual->add_option("file", file, "document path, or - for stdin")->required();
  dual->add_option("--n", dual_n, "integer surgery coefficient (nonzero)")->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    ComplexDocument doc = parse_complex(clidetail::read_input(file, in), default_field);
    if (truncation > 0) clidetail::truncate_document(doc, truncation);

    if (*validate) {
      if (as_json) {
        json r{{"valid", true},
               {"generators", doc.complex.size()},
               {"arrows", doc.complex.d.size()},
               {"flip", doc.flip.has_value()},
               {"reduced", doc.complex.is_reduced()}};
        out << r.dump() << "\n";
      } else {
        out << "ok: " << doc.complex.size() << " generators, " << doc.complex.d.size()
            << " arrows" << (doc.flip ? ", flip present" : "") << "\n";
      }
    } else if (*reduce) {
      ComplexDocument res;
      res.metadata = doc.metadata;
      if (doc.flip) {
        auto [c, psi] = reduce_with_flip(doc.complex, *doc.flip);
        res.complex = std::move(c);
        res.flip = std::move(psi);
      } else {
        res.complex = doc.complex.reduced();
      }
      out << serialize_complex(res);
    } else if (*surgery) {
      if (doc.complex.truncation)
        throw DomainError("surgery needs the untruncated complex over F[U,V]");
      if (!doc.flip) throw DomainError("surgery needs a flip map in the document");
      clidetail::Slope s = clidetail::parse_slope(slope_text);
      std::map<long long, FWModule> hf;
      if (spin_c >= 0) {
        MappingCone cone =
            build_cone(trivial_complex(doc.complex.p), trivial_flip(doc.complex.p), doc.complex,
                       *doc.flip, SurgerySpec{s.p, s.q, spin_c, window});
        hf[spin_c] = homology_fw(cone.x);
      } else {
        hf = hf_minus_surgery(doc.complex, *doc.flip, s.p, s.q, window);
      }
      if (as_json) {
        json summands = json::array();
        for (auto& [i, m] : hf) {
          json sj = module_to_json(m);
          sj["spin_c"] = i;
          sj["structure"] = module_structure(m);
          summands.push_back(std::move(sj));
        }
        out << json{{"slope", {{"p", s.p}, {"q", s.q}}}, {"summands", std::move(summands)}}.dump()
            << "\n";
      } else {
        out << "HF^- of " << s.p << "/" << s.q << " surgery:\n";
        for (auto& [i, m] : hf)
          out << "  spin-c " << i << ": " << module_structure(m) << "\n";
      }
    } else if (*dual) {
      if (doc.complex.truncation)
        throw DomainError("the dual-knot formula needs the untruncated complex over F[U,V]");
      if (!doc.flip) throw DomainError("the dual-knot formula needs a flip map in the document");
      auto duals = dual_knot_complex(doc.complex, *doc.flip, dual_n);
      if (as_json) {
        json summands = json::array();
        for (auto& [i, c] : duals) {
          ComplexDocument part;
          part.complex = c;
          part.metadata = json{{"gradings", "relative"}};
          summands.push_back(json{{"spin_c", i}, {"complex", complex_to_json(part)}});
        }
        out << json{{"n", dual_n}, {"summands", std::move(summands)}}.dump() << "\n";
      } else {
        out << "dual knot of " << dual_n << "-surgery (" << duals.size()
            << " spin-c classes, relative gradings):\n";
        for (auto& [i, c] : duals) {
          out << "spin-c " << i << ": " << c.size() << " generators\n";
          clidetail::print_complex(out, c, "  ");
        }
      }
    }
    return 0;
  } catch (const std::exception& e) {
    if (as_json)
      err << json{{"error", {{"type", clidetail::error_kind(e)}, {"message", e.what()}}}}.dump()
          << "\n";
    else
      err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cfk
