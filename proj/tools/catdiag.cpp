#include "catdiag/error.hpp"
#include "catdiag/parser.hpp"
#include "catdiag/server.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>

using namespace catdiag;

namespace {

enum Exit { kOk = 0, kReplay = 2, kVerify = 3, kIo = 4 };

struct Inputs {
  Context ctx;
  std::optional<Script> script; // absent when the diag file does not exist
};

// Context problems and unreadable files are input errors; a bad script is a
// replay failure.
Inputs load(const std::string& ctx_path, const std::string& diag_path, const SessionOptions&, bool functor_laws,
            bool need_script) {
  Inputs in{parse_context(read_file(ctx_path)), std::nullopt};
  NormOptions n = in.ctx.norm_options();
  n.functor_laws = functor_laws;
  in.ctx.set_norm_options(n);
  if (std::filesystem::exists(diag_path) || need_script) {
    std::string text = read_file(diag_path);
    try {
      in.script = parse_script(text);
    } catch (const SyntaxError& e) {
      std::cerr << diag_path << ":" << e.what() << "\n";
      throw Exit{kReplay};
    }
  }
  return in;
}

void print_obligations(const std::vector<std::string>& goals, const Context& ctx) {
  if (goals.empty()) {
    std::cout << "no remaining obligations\n";
    return;
  }
  for (const auto& g : goals) std::cout << "obligation " << g << " : " << print(ctx.meta(ctx.goal(g)->meta).sort) << "\n";
}

int interactive(Inputs in, const std::string& diag_path, const SessionOptions& opts, bool edit) {
  Session s([](const std::string& line) { std::cout << line << "\n" << std::flush; });
  StartOptions so;
  so.session = opts;
  so.script = std::move(in.script);
  so.edit = edit;
  so.save_path = diag_path;
  s.start(std::move(in.ctx), std::move(so));
  if (!s.closed()) serve_stream(s, std::cin);
  if (!s.closed() || s.proof().outcome() != Outcome::Succeeded) return kReplay;
  for (const auto& g : s.proof().obligations()) std::cerr << "obligation " << g << "\n";
  return kOk;
}

int run(const std::string& ctx_path, const std::string& diag_path, const SessionOptions& opts, bool fl) {
  Inputs in = load(ctx_path, diag_path, opts, fl, false);
  if (in.script) {
    ReplayResult r = replay(*in.script, in.ctx, opts);
    if (r.ok() && r.session.outcome() == Outcome::Succeeded) {
      print_obligations(r.session.obligations(), r.session.ctx());
      return kOk;
    }
    if (r.error) std::cerr << diag_path << ": step " << r.error->step + 1 << ": " << r.error->message << "\n";
  }
  return interactive(std::move(in), diag_path, opts, false);
}

int check(const std::string& ctx_path, const std::string& diag_path, const SessionOptions& opts, bool fl) {
  Inputs in = load(ctx_path, diag_path, opts, fl, true);
  ReplayResult r = replay(*in.script, in.ctx, opts);
  if (r.error) {
    std::cerr << diag_path << ": step " << r.error->step + 1 << ": " << to_string(r.error->code) << ": "
              << r.error->message << "\n";
    return kReplay;
  }
  if (r.session.outcome() != Outcome::Succeeded) {
    std::cerr << diag_path << ": script does not end with succeed\n";
    return kReplay;
  }
  bool ok = true;
  for (const auto& g : verify_goals(r.session.ctx())) {
    if (!g.proved) {
      std::cout << g.name << ": obligation\n";
    } else if (g.check.accepted) {
      std::cout << g.name << ": checked\n";
    } else {
      std::cout << g.name << ": REJECTED " << g.check.reason << "\n";
      ok = false;
    }
  }
  return ok ? kOk : kVerify;
}

std::atomic<bool> g_stop{false};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"catdiag: commutative diagram proofs"};
  app.require_subcommand(1);
  int depth = SolveOptions{}.depth;
  bool functor_laws = false;
  app.add_option("--depth", depth, "solver step budget")->check(CLI::Range(0, 64));
  app.add_flag("--functor-laws", functor_laws, "normalize modulo functor laws");

  std::string ctx_path, diag_path, exercises;
  unsigned short port = 8080;
  auto files = [&](CLI::App* sub) {
    sub->add_option("ctx", ctx_path, "context file")->required();
    sub->add_option("diag", diag_path, "proof script")->required();
  };
  CLI::App* run_cmd = app.add_subcommand("run", "replay the script; open a session if it does not finish");
  files(run_cmd);
  CLI::App* edit_cmd = app.add_subcommand("edit", "open a session with the script queued for redo");
  files(edit_cmd);
  CLI::App* check_cmd = app.add_subcommand("check", "replay and check every proof");
  files(check_cmd);
  CLI::App* serve_cmd = app.add_subcommand("serve", "websocket endpoint over a directory of exercises");
  serve_cmd->add_option("--port", port, "listening port");
  serve_cmd->add_option("--exercises", exercises, "directory of .ctx files")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  SessionOptions opts;
  opts.solve.depth = depth;
  try {
    if (*run_cmd) return run(ctx_path, diag_path, opts, functor_laws);
    if (*check_cmd) return check(ctx_path, diag_path, opts, functor_laws);
    if (*edit_cmd) return interactive(load(ctx_path, diag_path, opts, functor_laws, false), diag_path, opts, true);
    if (*serve_cmd) {
      std::signal(SIGINT, [](int) { g_stop = true; });
      std::signal(SIGTERM, [](int) { g_stop = true; });
      serve_websocket(port, exercises, opts, &g_stop,
                      [](unsigned short p) { std::cerr << "listening on 127.0.0.1:" << p << "\n"; });
      return kOk;
    }
  } catch (Exit e) {
    return e;
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
