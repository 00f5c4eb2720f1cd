#include "tensorpad/session.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

// Reads statements from stdin, evaluating each as soon as it is complete.
int interactive(tensorpad::Session& session, std::ostream& transcript, bool keep_going) {
  std::string pending;
  std::string line;
  int status = 0;
  std::cerr << "> " << std::flush;
  while (std::getline(std::cin, line)) {
    pending += line + '\n';
    auto statements = tensorpad::split_statements(pending);
    const std::string trimmed = line.substr(0, line.find_last_not_of(" \t\r") + 1);
    const bool complete = !trimmed.empty() && (trimmed.back() == ';' || trimmed.back() == '.');
    if (!complete && !statements.empty()) {
      std::cerr << "  " << std::flush;
      continue;
    }
    for (const auto& st : statements) {
      try {
        const auto out = session.eval_line(st.text);
        if (!out.plain.empty()) {
          std::cout << out.plain << '\n';
          transcript << out.plain << '\n';
        }
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        status = 1;
        if (!keep_going) break;
      }
    }
    pending.clear();
    std::cerr << "> " << std::flush;
  }
  return status;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensorpad: field-theory oriented tensor algebra scratch pad"};
  std::string script;
  std::string transcript_path;
  bool interactive_mode = false;
  bool serve = false;
  bool default_rules = false;
  bool keep_going = false;
  app.add_option("script", script, "Script file to run");
  app.add_flag("-i,--interactive", interactive_mode, "Read statements from standard input");
  app.add_flag("--serve", serve, "Speak the line-delimited JSON protocol on stdin/stdout");
  app.add_flag("--default-rules", default_rules,
               "Apply the standard post rules after every statement");
  app.add_option("--transcript", transcript_path, "Also write printed output to this file");
  app.add_flag("-k,--keep-going", keep_going, "Continue after a failing statement");
  CLI11_PARSE(app, argc, argv);

  tensorpad::Session session;
  session.set_default_rules(default_rules);

  if (serve) {
    tensorpad::serve_protocol(session, std::cin, std::cout);
    return 0;
  }

  std::ofstream transcript_file;
  std::ostringstream discard;
  if (!transcript_path.empty()) {
    transcript_file.open(transcript_path);
    if (!transcript_file) {
      std::cerr << "cannot write " << transcript_path << '\n';
      return 2;
    }
  }
  std::ostream& transcript = transcript_path.empty() ? static_cast<std::ostream&>(discard) : transcript_file;

  if (!script.empty() && !interactive_mode) {
    std::ostringstream out;
    const int status = tensorpad::run_script(session, script, {keep_going}, out, std::cerr);
    std::cout << out.str();
    transcript << out.str();
    return status;
  }
  if (!script.empty()) {
    std::ostringstream out;
    const int status = tensorpad::run_script(session, script, {keep_going}, out, std::cerr);
    std::cout << out.str();
    transcript << out.str();
    if (status != 0 && !keep_going) return status;
  }
  return interactive(session, transcript, keep_going);
}
