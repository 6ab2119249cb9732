#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral data, Green's function and sampling reconstructions for a Sturm-Liouville problem "
               "with two moving interfaces",
               "slms"};
  app.set_version_flag("--version", std::string(SLMS_VERSION));
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string format = "json";
  int jobs = 1;

  for (const char* name : {"spectrum", "sweep", "green", "reconstruct"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--out", out, "output file (default: standard output)");
    sub->add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--jobs", jobs, "concurrent sweep steps")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return slms::cli::kValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return slms::cli::run(command, config, out, format, jobs, std::cerr);
}
