#include "airyedge/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "airyedge/densities.hpp"
#include "airyedge/drift.hpp"
#include "airyedge/errors.hpp"
#include "airyedge/kernels.hpp"
#include "airyedge/manifest.hpp"
#include "airyedge/parallel.hpp"
#include "airyedge/quadrature.hpp"
#include "airyedge/sampler.hpp"
#include "airyedge/sde.hpp"
#include "airyedge/specfun.hpp"
#include "airyedge/verify.hpp"

namespace airyedge::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

// Merge a flat JSON config object as defaults: any key absent from argv is
// appended as --key value, so explicit flags win.
std::vector<std::string> apply_config(const std::vector<std::string>& args) {
  std::vector<std::string> out = args;
  std::string cfg_path;
  for (size_t i = 0; i + 1 < out.size(); ++i)
    if (out[i] == "--config") cfg_path = out[i + 1];
  if (cfg_path.empty()) return out;
  std::ifstream in(cfg_path);
  if (!in) throw input_error("cannot open config file " + cfg_path);
  json cfg = json::parse(in);
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    bool present = false;
    for (const auto& a : out)
      if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
    if (present) continue;
    out.push_back(flag);
    if (value.is_boolean()) {
      if (!value.get<bool>()) out.pop_back();
    } else if (value.is_string()) {
      out.push_back(value.get<std::string>());
    } else {
      out.push_back(value.dump());
    }
  }
  return out;
}

void write_json_artifact(const fs::path& path, const json& j, manifest::RunManifest& man) {
  manifest::write_file_atomic(path, j.dump(2) + "\n");
  man.add_output(path);
}

void finish(manifest::RunManifest& man, const fs::path& primary_output) {
  fs::path mpath = primary_output;
  mpath += ".manifest.json";
  man.write(mpath);
}

sampler::PointConfiguration read_first_sample(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open samples file " + path.string());
  std::string line;
  sampler::PointConfiguration cfg;
  cfg.frame = sampler::Frame::soft_edge;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("frame=raw") != std::string::npos) cfg.frame = sampler::Frame::raw;
      std::stringstream ss(line);
      std::string tok;
      while (ss >> tok) {
        if (tok.rfind("beta=", 0) == 0) cfg.beta = std::stoi(tok.substr(5));
        if (tok.rfind("n=", 0) == 0) cfg.n = std::stoi(tok.substr(2));
      }
      continue;
    }
    if (!header_done) {
      header_done = true;  // column header
      continue;
    }
    std::stringstream ss(line);
    std::string id, rank, pos;
    std::getline(ss, id, ',');
    std::getline(ss, rank, ',');
    std::getline(ss, pos, ',');
    if (id != "0") break;
    cfg.points.push_back(std::stod(pos));
  }
  if (cfg.points.empty()) throw input_error("no sample rows in " + path.string());
  if (cfg.n == 0) cfg.n = static_cast<int>(cfg.points.size());
  return cfg;
}

void write_path_csv(const fs::path& path, const sde::PathEnsemble& p) {
  std::string text = "time,rank,position\n";
  for (size_t k = 0; k < p.times.size(); ++k)
    for (size_t i = 0; i < p.states[k].size(); ++i)
      text += shortest(p.times[k]) + "," + std::to_string(i + 1) + "," +
              shortest(p.states[k][i]) + "\n";
  manifest::write_file_atomic(path, text);
}

void write_noise_csv(const fs::path& path, const sde::PathEnsemble& p) {
  std::string text = "time,rank,dW\n";
  for (size_t k = 0; k < p.noise.size(); ++k)
    for (size_t i = 0; i < p.noise[k].size(); ++i)
      text += shortest(p.times[k + 1]) + "," + std::to_string(i + 1) + "," +
              shortest(p.noise[k][i]) + "\n";
  manifest::write_file_atomic(path, text);
}

verify::Ceilings load_ceilings(const std::string& path) {
  if (path.empty()) return verify::Ceilings{};
  std::ifstream in(path);
  if (!in) throw input_error("cannot open ceilings file " + path);
  return verify::Ceilings::from_json(json::parse(in));
}

int run_impl(std::vector<std::string> args) {
  CLI::App app{"soft-edge random-matrix toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file supplying default flags");
  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (also AIRY_EDGE_THREADS)");

  // ---- kernel ----
  auto* kernel_cmd = app.add_subcommand("kernel", "evaluate correlation kernels");
  int k_beta = 2, k_n = 0;
  double k_x = 0.0, k_y = 0.0, k_ts = 0.0, k_tt = 0.0;
  bool k_extended = false;
  std::optional<double> k_palm;
  std::string k_out;
  kernel_cmd->add_option("--beta", k_beta);
  kernel_cmd->add_option("--n", k_n, "finite-n regime when positive");
  kernel_cmd->add_option("--x", k_x)->required();
  kernel_cmd->add_option("--y", k_y)->required();
  kernel_cmd->add_flag("--extended", k_extended, "extended (two-time) kernel, beta = 2");
  kernel_cmd->add_option("--time-s", k_ts);
  kernel_cmd->add_option("--time-t", k_tt);
  kernel_cmd->add_option("--palm", [&k_palm](const std::vector<std::string>& v) {
    k_palm = std::stod(v.at(0));
    return true;
  }, "reduced-Palm anchor");
  kernel_cmd->add_option("--out", k_out, "write the JSON artifact here");

  // ---- corr ----
  auto* corr_cmd = app.add_subcommand("corr", "correlation function at a point set");
  int c_beta = 2, c_n = 0;
  std::string c_points, c_out;
  std::optional<double> c_palm;
  corr_cmd->add_option("--beta", c_beta);
  corr_cmd->add_option("--n", c_n);
  corr_cmd->add_option("--points", c_points)->required();
  corr_cmd->add_option("--palm", [&c_palm](const std::vector<std::string>& v) {
    c_palm = std::stod(v.at(0));
    return true;
  });
  corr_cmd->add_option("--out", c_out);

  // ---- density ----
  auto* dens_cmd = app.add_subcommand("density", "reference densities and compensators");
  std::string d_op = "rho-hat";
  int d_n = 0;
  double d_x = 0.0, d_r = 1.0;
  std::string d_out;
  dens_cmd->add_option("--op", d_op, "rho-hat | semicircle | compensator");
  dens_cmd->add_option("--n", d_n, "finite-n regime when positive");
  dens_cmd->add_option("--x", d_x);
  dens_cmd->add_option("--r", d_r, "compensator radius (inf allowed for finite n)");
  dens_cmd->add_option("--out", d_out);

  // ---- drift ----
  auto* drift_cmd = app.add_subcommand("drift", "regularized drift quantities");
  std::string dr_op = "log-derivative";
  int dr_beta = 2, dr_n = 0;
  double dr_x = 0.0, dr_r = 50.0, dr_shell = 200.0;
  std::string dr_config, dr_out, dr_mode = "semicircle";
  drift_cmd->add_option("--op", dr_op,
                        "finite-log-derivative | isde | u-beta | log-derivative | "
                        "gradient | m-n-r | free-potential | w-term");
  drift_cmd->add_option("--beta", dr_beta);
  drift_cmd->add_option("--n", dr_n);
  drift_cmd->add_option("--x", dr_x);
  drift_cmd->add_option("--r", dr_r);
  drift_cmd->add_option("--shell", dr_shell);
  drift_cmd->add_option("--mode", dr_mode, "semicircle | finite-n");
  drift_cmd->add_option("--points", dr_config, "comma-separated configuration");
  drift_cmd->add_option("--out", dr_out);

  // ---- sample ----
  auto* sample_cmd = app.add_subcommand("sample", "tridiagonal beta-ensemble sampling");
  int s_beta = 2, s_n = 10, s_count = 1;
  uint64_t s_seed = 0;
  bool s_soft = false;
  std::string s_out;
  sample_cmd->add_option("--beta", s_beta);
  sample_cmd->add_option("--n", s_n);
  sample_cmd->add_option("--count", s_count);
  sample_cmd->add_option("--seed", s_seed);
  sample_cmd->add_flag("--soft-edge", s_soft, "emit soft-edge coordinates");
  sample_cmd->add_option("--out", s_out)->required();

  // ---- dpp ----
  auto* dpp_cmd = app.add_subcommand("dpp", "determinantal sampling of the windowed kernel");
  int p_n = 20, p_grid = 0, p_count = 1;
  uint64_t p_seed = 0;
  double p_lo = -8.0, p_hi = 3.0;
  std::optional<double> p_palm;
  std::string p_out;
  dpp_cmd->add_option("--n", p_n);
  dpp_cmd->add_option("--window-lo", p_lo);
  dpp_cmd->add_option("--window-hi", p_hi);
  dpp_cmd->add_option("--grid", p_grid, "grid sites (default 400 per unit window)");
  dpp_cmd->add_option("--count", p_count);
  dpp_cmd->add_option("--seed", p_seed);
  dpp_cmd->add_option("--palm", [&p_palm](const std::vector<std::string>& v) {
    p_palm = std::stod(v.at(0));
    return true;
  });
  dpp_cmd->add_option("--out", p_out)->required();

  // ---- simulate ----
  auto* sim_cmd = app.add_subcommand("simulate", "finite or frozen-tail SDE paths");
  int m_beta = 2, m_n = 20, m_head = 0;
  double m_dt = 1e-4, m_T = 1.0, m_guard = 0.02, m_r = 50.0;
  uint64_t m_seed = 0, m_init_seed = 1;
  std::string m_out, m_init_file, m_mode = "finite-n";
  bool m_store_noise = false;
  sim_cmd->add_option("--beta", m_beta);
  sim_cmd->add_option("--n", m_n);
  sim_cmd->add_option("--m", m_head, "head size; 0 integrates all particles");
  sim_cmd->add_option("--dt", m_dt);
  sim_cmd->add_option("--t-final", m_T);
  sim_cmd->add_option("--guard", m_guard);
  sim_cmd->add_option("--r", m_r, "truncation radius for the semicircle mode");
  sim_cmd->add_option("--mode", m_mode, "finite-n | semicircle");
  sim_cmd->add_option("--seed", m_seed);
  sim_cmd->add_option("--init-seed", m_init_seed, "ensemble seed for the initial state");
  sim_cmd->add_option("--init-file", m_init_file, "CSV with the initial configuration");
  sim_cmd->add_flag("--store-noise", m_store_noise);
  sim_cmd->add_option("--out", m_out)->required();

  // ---- girsanov ----
  auto* gir_cmd = app.add_subcommand("girsanov", "Radon-Nikodym density experiments");
  gir_cmd->set_help_flag("--help", "print help");  // frees -h for the h parameter
  int g_m = 1, g_count = 1000;
  double g_h = 1e6, g_T = 0.1, g_dt = 1e-3, g_r = 30.0;
  uint64_t g_seed = 0;
  int g_beta = 2;
  std::string g_tail_file, g_tail_list, g_out, g_path_csv, g_noise_csv;
  gir_cmd->add_option("--beta", g_beta);
  gir_cmd->add_option("--m", g_m);
  gir_cmd->add_option("--h", g_h);
  gir_cmd->add_option("--t-final", g_T);
  gir_cmd->add_option("--dt", g_dt);
  gir_cmd->add_option("--r", g_r);
  gir_cmd->add_option("--count", g_count);
  gir_cmd->add_option("--seed", g_seed);
  gir_cmd->add_option("--tail-file", g_tail_file, "samples CSV; head = first m points");
  gir_cmd->add_option("--tail", g_tail_list, "comma-separated frozen tail");
  gir_cmd->add_option("--path-csv", g_path_csv, "single-path mode: recorded path");
  gir_cmd->add_option("--noise-csv", g_noise_csv, "single-path mode: stored increments");
  gir_cmd->add_option("--out", g_out);

  // ---- gap ----
  auto* gap_cmd = app.add_subcommand("gap", "Tracy-Widom gap probability F2(s)");
  double gap_s = 0.0;
  int gap_order = 60;
  std::string gap_out;
  gap_cmd->add_option("--s", gap_s)->required();
  gap_cmd->add_option("--order", gap_order);
  gap_cmd->add_option("--out", gap_out);

  // ---- verify ----
  auto* ver_cmd = app.add_subcommand("verify", "numerical verification suites");
  std::string v_suite = "density-bound", v_out, v_ceilings, v_calibrate;
  int v_beta = 2, v_n = 50, v_mc = 10000, v_grid = 60;
  double v_x = 0.0;
  uint64_t v_seed = 0;
  std::string v_nlist = "20,50,100", v_slist = "4,16,64,256", v_klist = "1,2,3";
  ver_cmd->add_option("--suite", v_suite,
                      "density-bound | palm-difference | I-integrals | variance | G-decay");
  ver_cmd->add_option("--beta", v_beta);
  ver_cmd->add_option("--n", v_n);
  ver_cmd->add_option("--n-list", v_nlist);
  ver_cmd->add_option("--s-list", v_slist);
  ver_cmd->add_option("--k-list", v_klist);
  ver_cmd->add_option("--x", v_x);
  ver_cmd->add_option("--grid-points", v_grid);
  ver_cmd->add_option("--mc", v_mc);
  ver_cmd->add_option("--seed", v_seed);
  ver_cmd->add_option("--ceilings", v_ceilings, "JSON ceilings override");
  ver_cmd->add_option("--calibrate", v_calibrate,
                      "write ceilings as 1.5x the observed values to this file");
  ver_cmd->add_option("--out", v_out, "write the JSON report here");

  for (auto* sc : app.get_subcommands({})) sc->fallthrough();

  std::vector<const char*> argv;
  argv.push_back("airyedge");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (threads > 0) {
    // narrow the global cap for this process
    setenv("AIRY_EDGE_THREADS", std::to_string(max_threads(threads)).c_str(), 1);
  }

  if (kernel_cmd->parsed()) {
    manifest::RunManifest man("kernel");
    json j;
    j["beta"] = k_beta;
    j["x"] = k_x;
    j["y"] = k_y;
    if (k_extended) {
      j["time_s"] = k_ts;
      j["time_t"] = k_tt;
      j["value"] = kernels::extended_airy_kernel(k_ts, k_x, k_tt, k_y);
    } else {
      kernels::KernelHandle h = k_n > 0 ? kernels::KernelHandle::finite_n(k_beta, k_n)
                                        : kernels::KernelHandle::limit(k_beta);
      if (k_palm) h = h.palm(*k_palm);
      if (k_n > 0) j["n"] = k_n;
      if (k_palm) j["palm"] = *k_palm;
      if (k_beta == 2) {
        j["value"] = kernels::kernel_scalar(h, k_x, k_y);
      } else {
        const auto q = kernels::kernel_quaternion(h, k_x, k_y);
        j["quaternion"] = {{"q0re", q.q0.real()}, {"q0im", q.q0.imag()},
                           {"q1re", q.q1.real()}, {"q1im", q.q1.imag()},
                           {"q2re", q.q2.real()}, {"q2im", q.q2.imag()},
                           {"q3re", q.q3.real()}, {"q3im", q.q3.imag()}};
        j["scalar_part"] = q.scalar_part().real();
      }
    }
    man.params = j;
    std::cout << j.dump(2) << "\n";
    if (!k_out.empty()) {
      write_json_artifact(k_out, j, man);
      finish(man, k_out);
    }
    return 0;
  }

  if (corr_cmd->parsed()) {
    manifest::RunManifest man("corr");
    kernels::KernelHandle h = c_n > 0 ? kernels::KernelHandle::finite_n(c_beta, c_n)
                                      : kernels::KernelHandle::limit(c_beta);
    if (c_palm) h = h.palm(*c_palm);
    const auto pts = parse_list(c_points);
    const double rho = kernels::correlation({h, pts});
    json j{{"beta", c_beta}, {"points", pts}, {"rho", rho}};
    if (c_n > 0) j["n"] = c_n;
    man.params = j;
    std::cout << j.dump(2) << "\n";
    if (!c_out.empty()) {
      write_json_artifact(c_out, j, man);
      finish(man, c_out);
    }
    return 0;
  }

  if (dens_cmd->parsed()) {
    manifest::RunManifest man("density");
    const auto d = d_n > 0 ? densities::EdgeDensity::finite_n(d_n)
                           : densities::EdgeDensity::limit();
    json j{{"op", d_op}, {"x", d_x}};
    if (d_n > 0) j["n"] = d_n;
    if (d_op == "rho-hat") j["value"] = densities::rho_hat(d, d_x);
    else if (d_op == "semicircle") j["value"] = densities::semicircle(d_x);
    else if (d_op == "compensator") {
      j["r"] = d_r;
      j["value"] = densities::compensator(d, d_r);
    } else throw input_error("density: unknown --op " + d_op);
    man.params = j;
    std::cout << j.dump(2) << "\n";
    if (!d_out.empty()) {
      write_json_artifact(d_out, j, man);
      finish(man, d_out);
    }
    return 0;
  }

  if (drift_cmd->parsed()) {
    manifest::RunManifest man("drift");
    const auto pts = parse_list(dr_config);
    drift::DriftSpec spec;
    spec.beta = dr_beta;
    spec.truncation_radius = dr_r;
    spec.shell = dr_shell;
    spec.n = dr_n;
    spec.mode = dr_mode == "finite-n" ? drift::CompensatorMode::finite_n
                                      : drift::CompensatorMode::semicircle;
    json j{{"op", dr_op}, {"beta", dr_beta}, {"x", dr_x}};
    if (dr_op == "finite-log-derivative")
      j["value"] = drift::finite_log_derivative(dr_beta, dr_n, dr_x, pts);
    else if (dr_op == "isde")
      j["value"] = drift::truncated_isde_drift(spec, dr_x, pts);
    else if (dr_op == "u-beta")
      j["value"] = dr_n > 0 ? drift::u_beta(dr_beta, dr_x, 0, drift::Regime::finite, dr_n)
                            : drift::u_beta(dr_beta, dr_x, dr_shell, drift::Regime::limit);
    else if (dr_op == "log-derivative") {
      const auto routes = drift::log_derivative_routes(spec, dr_x, pts);
      j["value"] = routes.decomposed;
      j["route_direct"] = routes.direct;
    } else if (dr_op == "gradient")
      j["value"] = drift::drift_gradient(dr_beta, dr_x, pts, dr_r);
    else if (dr_op == "m-n-r")
      j["value"] = drift::m_n_r(dr_beta, dr_n, dr_r);
    else if (dr_op == "free-potential")
      j["value"] = drift::free_potential(dr_beta, dr_x);
    else if (dr_op == "w-term")
      j["value"] = drift::w_term(dr_beta, dr_n, dr_shell, dr_x, pts);
    else throw input_error("drift: unknown --op " + dr_op);
    man.params = j;
    std::cout << j.dump(2) << "\n";
    if (!dr_out.empty()) {
      write_json_artifact(dr_out, j, man);
      finish(man, dr_out);
    }
    return 0;
  }

  if (sample_cmd->parsed()) {
    manifest::RunManifest man("sample");
    man.seed = s_seed;
    std::vector<sampler::PointConfiguration> samples(s_count);
    parallel_for(s_count, [&](int64_t i) {
      auto cfg = sampler::sample_beta_ensemble(s_beta, s_n, s_seed, i);
      samples[i] = s_soft ? sampler::to_soft_edge(cfg) : std::move(cfg);
    });
    std::ostringstream os;
    sampler::write_samples_csv(os, samples, s_seed);
    manifest::write_file_atomic(s_out, os.str());
    man.params = {{"beta", s_beta}, {"n", s_n},     {"count", s_count},
                  {"seed", s_seed}, {"soft_edge", s_soft}};
    man.add_output(s_out);
    finish(man, s_out);
    return 0;
  }

  if (dpp_cmd->parsed()) {
    manifest::RunManifest man("dpp");
    man.seed = p_seed;
    if (p_grid <= 0) p_grid = static_cast<int>(400.0 * (p_hi - p_lo));
    kernels::KernelHandle h = kernels::KernelHandle::finite_n(2, p_n);
    if (p_palm) h = h.palm(*p_palm);
    const sampler::DppSampler dpp(h, p_lo, p_hi, p_grid);
    std::vector<sampler::PointConfiguration> samples(p_count);
    parallel_for(p_count, [&](int64_t i) { samples[i] = dpp.draw(p_seed, i); });
    std::ostringstream os;
    sampler::write_samples_csv(os, samples, p_seed);
    manifest::write_file_atomic(p_out, os.str());
    man.params = {{"n", p_n},       {"window_lo", p_lo}, {"window_hi", p_hi},
                  {"grid", p_grid}, {"count", p_count},  {"seed", p_seed},
                  {"expected_count", dpp.expected_count()}};
    if (p_palm) man.params["palm"] = *p_palm;
    man.add_output(p_out);
    finish(man, p_out);
    return 0;
  }

  if (sim_cmd->parsed()) {
    manifest::RunManifest man("simulate");
    man.seed = m_seed;
    sde::SDEConfig cfg;
    cfg.dt = m_dt;
    cfg.t_final = m_T;
    cfg.collision_guard = m_guard;
    cfg.seed = m_seed;
    cfg.drift_spec.beta = m_beta;
    cfg.drift_spec.truncation_radius = m_r;
    cfg.drift_spec.n = m_n;
    cfg.drift_spec.mode = m_mode == "semicircle" ? drift::CompensatorMode::semicircle
                                                 : drift::CompensatorMode::finite_n;
    sampler::PointConfiguration init;
    if (!m_init_file.empty()) {
      init = read_first_sample(m_init_file);
      man.add_input(m_init_file);
      if (init.frame == sampler::Frame::raw) init = sampler::to_soft_edge(init);
      m_n = static_cast<int>(init.points.size());
    } else {
      init = sampler::to_soft_edge(sampler::sample_beta_ensemble(m_beta, m_n, m_init_seed));
    }
    sde::PathEnsemble path;
    if (m_head > 0 && m_head < m_n) {
      sampler::PointConfiguration head = init;
      head.points.assign(init.points.begin(), init.points.begin() + m_head);
      std::vector<double> tail(init.points.begin() + m_head, init.points.end());
      path = sde::simulate_truncated_isde(m_beta, m_head, head, tail, cfg);
    } else {
      path = sde::simulate_finite(m_beta, m_n, init, cfg);
    }
    write_path_csv(m_out, path);
    man.add_output(m_out);
    json sidecar{{"beta", m_beta},   {"n", m_n},           {"m", m_head},
                 {"dt", m_dt},       {"t_final", m_T},     {"guard", m_guard},
                 {"seed", m_seed},   {"r", m_r},           {"mode", m_mode},
                 {"accepted", path.accepted}, {"rejected", path.rejected},
                 {"frozen_tail", path.frozen_tail}};
    const fs::path side = fs::path(m_out).replace_extension(".config.json");
    write_json_artifact(side, sidecar, man);
    if (m_store_noise) {
      const fs::path noise = fs::path(m_out).replace_extension(".noise.csv");
      write_noise_csv(noise, path);
      man.add_output(noise);
    }
    man.params = sidecar;
    finish(man, m_out);
    return 0;
  }

  if (gir_cmd->parsed()) {
    manifest::RunManifest man("girsanov");
    man.seed = g_seed;
    drift::DriftSpec spec;
    spec.beta = g_beta;
    spec.truncation_radius = g_r;
    std::vector<double> tail;
    std::vector<double> head_start;
    if (!g_tail_file.empty()) {
      const auto cfg = read_first_sample(g_tail_file);
      man.add_input(g_tail_file);
      head_start.assign(cfg.points.begin(), cfg.points.begin() + g_m);
      tail.assign(cfg.points.begin() + g_m, cfg.points.end());
    } else if (!g_tail_list.empty()) {
      tail = parse_list(g_tail_list);
      head_start.assign(g_m, 0.0);
      for (int i = 0; i < g_m; ++i)
        head_start[i] = (tail.empty() ? 0.0 : *std::max_element(tail.begin(), tail.end())) +
                        1.0 + (g_m - 1 - i);
    } else {
      throw input_error("girsanov: need --tail-file or --tail");
    }

    json j{{"m", g_m}, {"h", g_h},   {"t_final", g_T},  {"dt", g_dt},
           {"r", g_r}, {"beta", g_beta}, {"count", g_count}, {"seed", g_seed}};
    if (!g_path_csv.empty()) {
      // single-path mode: evaluate the accumulator along a recorded path
      if (g_noise_csv.empty())
        throw input_error("girsanov: single-path mode needs --noise-csv");
      auto read_triples = [](const fs::path& file) {
        std::ifstream in(file);
        if (!in) throw input_error("cannot open " + file.string());
        std::string line;
        std::getline(in, line);  // header
        std::map<double, std::vector<double>> rows;
        while (std::getline(in, line)) {
          if (line.empty()) continue;
          std::stringstream ss(line);
          std::string t, rank, v;
          std::getline(ss, t, ',');
          std::getline(ss, rank, ',');
          std::getline(ss, v, ',');
          rows[std::stod(t)].push_back(std::stod(v));
        }
        return rows;
      };
      const auto prows = read_triples(g_path_csv);
      const auto nrows = read_triples(g_noise_csv);
      man.add_input(g_path_csv);
      man.add_input(g_noise_csv);
      sde::PathEnsemble path;
      for (const auto& [time, state] : prows) {
        path.times.push_back(time);
        path.states.push_back(state);
      }
      for (const auto& [time, dw] : nrows) path.noise.push_back(dw);
      const auto acc = sde::girsanov_log_density(path, g_m, tail, g_h, spec);
      j["log_density"] = acc.log_density();
      j["stochastic_integral"] = acc.stochastic_integral;
      j["quadratic_half"] = acc.quadratic_half;
      j["tau"] = acc.tau;
      j["tau_reached"] = acc.tau_reached;
      man.params = j;
      std::cout << j.dump(2) << "\n";
      if (!g_out.empty()) {
        write_json_artifact(g_out, j, man);
        finish(man, g_out);
      }
      return 0;
    }
    sde::SDEConfig cfg;
    cfg.dt = g_dt;
    cfg.t_final = g_T;
    cfg.collision_guard = 2.0 * std::sqrt(g_dt);
    cfg.drift_spec = spec;
    std::vector<double> exp_rn(g_count);
    std::vector<double> taus(g_count);
    parallel_for(g_count, [&](int64_t i) {
      sde::SDEConfig local = cfg;
      local.seed = g_seed;
      local.stream = i;
      const auto path = sde::simulate_brownian(g_m, head_start, local);
      const auto acc = sde::girsanov_log_density(path, g_m, tail, g_h, spec);
      exp_rn[i] = std::exp(acc.log_density());
      taus[i] = acc.tau;
    });
    double mean = 0.0;
    for (double v : exp_rn) mean += v;
    mean /= g_count;
    double var = 0.0;
    int reached = 0;
    for (size_t i = 0; i < exp_rn.size(); ++i) {
      var += (exp_rn[i] - mean) * (exp_rn[i] - mean);
      if (taus[i] < g_T) ++reached;
    }
    var /= g_count;
    j["mean_exp_rn"] = mean;
    j["std_error"] = std::sqrt(var / g_count);
    j["tau_stopped_fraction"] = static_cast<double>(reached) / g_count;
    man.params = j;
    std::cout << j.dump(2) << "\n";
    if (!g_out.empty()) {
      write_json_artifact(g_out, j, man);
      finish(man, g_out);
    }
    return 0;
  }

  if (gap_cmd->parsed()) {
    manifest::RunManifest man("gap");
    const double value = kernels::fredholm_gap(gap_s, gap_order);
    json j{{"s", gap_s}, {"order", gap_order}, {"value", value}};
    man.params = j;
    std::cout << j.dump(2) << "\n";
    if (!gap_out.empty()) {
      write_json_artifact(gap_out, j, man);
      finish(man, gap_out);
    }
    return 0;
  }

  if (ver_cmd->parsed()) {
    manifest::RunManifest man("verify");
    man.seed = v_seed;
    const verify::Ceilings ceilings = load_ceilings(v_ceilings);
    verify::BoundReport report;
    if (v_suite == "density-bound") {
      std::vector<int> ns;
      for (double v : parse_list(v_nlist)) ns.push_back(static_cast<int>(v));
      report = verify::check_density_bound(v_beta, ns, v_grid, v_beta == 2, ceilings);
    } else if (v_suite == "palm-difference") {
      report = verify::check_palm_difference(v_beta, v_n, v_x, v_grid, ceilings);
    } else if (v_suite == "I-integrals") {
      std::vector<int> ks;
      for (double v : parse_list(v_klist)) ks.push_back(static_cast<int>(v));
      report = verify::evaluate_I_integrals(v_beta, v_n, ks, v_x, parse_list(v_slist),
                                            ceilings);
    } else if (v_suite == "variance") {
      report = verify::variance_check(v_n, v_x, parse_list(v_slist).front(), v_mc, v_seed,
                                      ceilings, threads);
    } else if (v_suite == "G-decay") {
      const verify::GExponents sets[] = {{-0.25, 0.5, 1.0, 0.0}, {0.0, 0.0, 2.0, 0.0}};
      report = verify::check_G_decay(sets, parse_list(v_slist), ceilings);
    } else {
      throw input_error("verify: unknown suite " + v_suite);
    }
    if (!v_ceilings.empty()) man.add_input(v_ceilings);
    const json j = report.to_json();
    man.params = j["params"];
    std::cout << j.dump(2) << "\n";
    if (!v_out.empty()) {
      write_json_artifact(v_out, j, man);
      finish(man, v_out);
    }
    if (!v_calibrate.empty()) {
      verify::Ceilings cal = ceilings;
      for (const auto& v : report.verdicts) {
        const double margin = v.value * 1.5;
        if (v.name == "uniform_bound") cal.density_sup = margin;
        if (v.name == "limit_bound") cal.density_limit_sup = margin;
        if (v.name == "sqrt_growth") cal.density_sqrt_growth = margin;
        if (v.name == "weighted_bound") cal.palm_weighted_sup = margin;
        if (v.name == "final_below_ceiling" && v_suite == "I-integrals")
          cal.i_integral_last = margin;
        if (v.name == "final_below_ceiling" && v_suite == "G-decay")
          cal.g_decay_last = margin;
      }
      manifest::write_file_atomic(v_calibrate, cal.to_json().dump(2) + "\n");
    }
    return report.pass() ? 0 : 1;
  }

  return 2;
}

}  // namespace

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    args = apply_config(args);
    return run_impl(std::move(args));
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace airyedge::cli
