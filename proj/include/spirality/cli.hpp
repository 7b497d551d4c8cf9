#pragma once

// Command line surface. Exit codes: 0 positive verdict, 1 negative verdict,
// 2 malformed input or usage, 3 the input falls outside the hypotheses of
// the separability criterion.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spirality/io.hpp"
#include "spirality/jsj_graph.hpp"
#include "spirality/phi_surface.hpp"
#include "spirality/semicover.hpp"

namespace spirality::cli {

struct Options {
  bool json = false;
  bool color = false;
  std::optional<std::string> out_path;
};

struct Report {
  int exit_code = 0;
  std::string out;
  std::string err;
  io::json data;
};

namespace detail {

inline std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string paint(const std::string& word, bool good, bool color) {
  if (!color) return word;
  return std::string(good ? "\x1b[32m" : "\x1b[31m") + word + "\x1b[0m";
}

inline io::json cycle_json(const Cycle& c) {
  io::json out = io::json::array();
  for (const auto& oe : c) out.push_back((oe.forward ? "" : "-") + oe.edge);
  return out;
}

inline Report input_failure(const std::string& path, const std::vector<io::InputError>& errors) {
  Report r;
  r.exit_code = 2;
  io::json list = io::json::array();
  for (const auto& e : errors) {
    r.err += path + ": " + e.to_string() + "\n";
    list.push_back(e.to_string());
  }
  r.data = {{"file", path}, {"errors", list}};
  return r;
}

inline Report domain_failure(const std::string& path, const Error& e) {
  Report r;
  r.exit_code = e.code() == ErrorCode::HypothesesViolated ? 3 : 2;
  r.err = path + ": " + e.what() + "\n";
  r.data = {{"file", path}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}};
  return r;
}

inline Report run_lerf(const Instance& inst, const Options& o) {
  LerfVerdict v = is_lerf(inst.jsj);
  Report r;
  r.exit_code = v.lerf ? 0 : 1;
  r.out = v.lerf ? paint("Lerf", true, o.color) + "\n" : paint("NotLerf", false, o.color) + " edge=" + *v.witness_edge + "\n";
  r.data = {{"verdict", v.lerf ? "Lerf" : "NotLerf"}};
  if (!v.lerf) r.data["edge"] = *v.witness_edge;
  return r;
}

inline Report run_spirality(const Instance& inst, const Options&) {
  Report r;
  io::json cycles = io::json::array();
  for (const Cycle& c : cycle_basis(inst.phi)) {
    SpiralityValue v = spirality_on_cycle(inst.phi, c);
    r.out += "cycle=" + format_cycle(c) + " value=" + v.to_string() + "\n";
    cycles.push_back({{"cycle", cycle_json(c)}, {"value", v.to_string()}});
  }
  if (cycles.empty()) r.out = "no cycles\n";
  r.data = {{"cycles", cycles}};
  return r;
}

inline Report run_separable(const Instance& inst, const Options& o) {
  SeparabilityVerdict v = separability_verdict(inst.jsj, inst.phi, inst.infinite_index);
  Report r;
  r.exit_code = v.separable ? 0 : 1;
  if (v.separable) {
    r.out = paint("Separable", true, o.color) + "\n";
    r.data = {{"verdict", "Separable"}};
  } else {
    r.out = paint("NotSeparable", false, o.color) + " cycle=" + format_cycle(*v.witness) + " value=" + v.value->to_string() + "\n";
    r.data = {{"verdict", "NotSeparable"}, {"cycle", cycle_json(*v.witness)}, {"value", v.value->to_string()}};
  }
  return r;
}

inline Report run_assemble(const Instance& inst, const std::string& text, const Options& o) {
  AssemblyResult res = assemble(inst);
  Report r;
  if (const auto* ob = std::get_if<SpiralObstruction>(&res)) {
    r.exit_code = 1;
    r.out = paint("SpiralObstruction", false, o.color) + " chord=" + ob->chord + " cycle=" + format_cycle(ob->cycle) +
            " value=" + ob->value.to_string() + "\n";
    r.data = {{"verdict", "SpiralObstruction"},
              {"chord", ob->chord},
              {"cycle", cycle_json(ob->cycle)},
              {"value", ob->value.to_string()}};
    return r;
  }
  io::CertificateFile file{io::instance_digest(text), std::get<CoverCertificate>(res)};
  const std::string cert = io::serialize_certificate(file);
  const std::string frak_a = spirality::detail::to_decimal(file.certificate.constants.frak_a);
  r.data = {{"verdict", "Assembled"}, {"frak_a", frak_a}, {"edges", file.certificate.edges.size()}};
  if (o.out_path) {
    std::ofstream f(*o.out_path, std::ios::binary);
    if (!f || !(f << cert)) {
      r.exit_code = 2;
      r.err = "cannot write " + *o.out_path + "\n";
      return r;
    }
    r.out = paint("Assembled", true, o.color) + " frak_a=" + frak_a + " edges=" + std::to_string(file.certificate.edges.size()) + "\n";
  } else {
    r.out = cert;
    r.data["certificate"] = io::to_json(file);
  }
  return r;
}

inline Report run_verify(const Instance& inst, const std::string& text, const std::string& cert_path, const Options& o) {
  auto cert_text = read_file(cert_path);
  if (!cert_text) return input_failure(cert_path, {{io::InputErrorKind::SyntaxError, "cannot read file", 0, 0, {}}});
  auto parsed = io::parse_certificate(*cert_text);
  if (!parsed.ok()) return input_failure(cert_path, parsed.errors);
  VerifyReport rep;
  if (parsed.value->instance_sha256 != io::instance_digest(text)) {
    rep.ok = false;
    rep.violations.push_back("certificate is bound to a different instance");
  } else {
    rep = verify_certificate(inst, parsed.value->certificate);
  }
  Report r;
  r.exit_code = rep.ok ? 0 : 1;
  r.out = paint(rep.ok ? "Verified" : "Rejected", rep.ok, o.color) + "\n";
  for (const auto& v : rep.violations) r.out += "  " + v + "\n";
  r.data = {{"verdict", rep.ok ? "Verified" : "Rejected"}, {"violations", rep.violations}};
  return r;
}

inline Report run_file(const std::string& command, const std::string& path, const std::string& cert_path,
                       const Options& o) {
  auto text = read_file(path);
  if (!text) return input_failure(path, {{io::InputErrorKind::SyntaxError, "cannot read file", 0, 0, {}}});
  auto parsed = io::parse_instance(*text);
  if (!parsed.ok()) return input_failure(path, parsed.errors);
  const Instance& inst = *parsed.value;
  Report r;
  try {
    if (command == "lerf")
      r = run_lerf(inst, o);
    else if (command == "spirality")
      r = run_spirality(inst, o);
    else if (command == "separable")
      r = run_separable(inst, o);
    else if (command == "assemble")
      r = run_assemble(inst, *text, o);
    else
      r = run_verify(inst, *text, cert_path, o);
  } catch (const Error& e) {
    return domain_failure(path, e);
  }
  r.data["command"] = command;
  r.data["file"] = path;
  r.data["exit"] = r.exit_code;
  return r;
}

inline std::vector<std::string> instance_files(const std::string& dir) {
  std::vector<std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (name.size() >= 10 && name.ends_with(".cert.json")) continue;
    out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Runs one invocation. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color = false) {
  CLI::App app{"Separability of subgroups of mixed 3-manifold groups", "spirality"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opts;
  opts.color = color;
  app.add_flag("--json", opts.json, "Machine-readable report on stdout");

  std::string file, cert, each_dir, out_path;
  auto add_input = [&](CLI::App* sub) {
    auto* f = sub->add_option("FILE", file, "Instance file");
    auto* e = sub->add_option("--each", each_dir, "Process every instance in a directory");
    f->excludes(e);
    e->excludes(f);
  };
  auto* lerf = app.add_subcommand("lerf", "Decide whether the fundamental group is Lerf");
  add_input(lerf);
  auto* spir = app.add_subcommand("spirality", "Print the spirality of every basis cycle");
  add_input(spir);
  auto* sep = app.add_subcommand("separable", "Decide separability of the subgroup");
  add_input(sep);
  auto* asmb = app.add_subcommand("assemble", "Build a semi-cover certificate");
  add_input(asmb);
  asmb->add_option("--out", out_path, "Write the certificate here");
  auto* ver = app.add_subcommand("verify", "Check a certificate against an instance");
  ver->add_option("FILE", file, "Instance file")->required();
  ver->add_option("CERT", cert, "Certificate file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (!out_path.empty()) opts.out_path = out_path;
  if (opts.json) opts.color = false;

  if (each_dir.empty() && file.empty()) {
    err << "missing FILE or --each DIR\n";
    return 2;
  }
  if (!each_dir.empty()) {
    if (opts.out_path) {
      err << "--out cannot be combined with --each\n";
      return 2;
    }
    std::vector<std::string> files;
    try {
      files = detail::instance_files(each_dir);
    } catch (const std::filesystem::filesystem_error& e) {
      err << "cannot list " << each_dir << ": " << e.what() << "\n";
      return 2;
    }
    std::vector<std::future<Report>> jobs;
    for (const auto& f : files)
      jobs.push_back(std::async(std::launch::async, [&, f] { return detail::run_file(command, f, "", opts); }));
    int worst = 0;
    io::json all = io::json::array();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      Report r = jobs[i].get();
      worst = std::max(worst, r.exit_code);
      const std::string name = std::filesystem::path(files[i]).filename().string();
      if (opts.json) {
        all.push_back(r.data);
      } else {
        out << "== " << name << " ==\n" << r.out;
      }
      err << r.err;
    }
    if (opts.json) out << all.dump(2) << "\n";
    return worst;
  }

  Report r = detail::run_file(command, file, cert, opts);
  if (opts.json)
    out << r.data.dump(2) << "\n";
  else
    out << r.out;
  err << r.err;
  return r.exit_code;
}

}  // namespace spirality::cli
