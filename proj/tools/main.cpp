#include <nldisp/cli.hpp>

int main(int argc, char** argv) { return nldisp::cli::run(argc, argv); }
