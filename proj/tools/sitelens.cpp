#include "sitelens/cli/cli.hpp"

int main(int argc, char** argv) { return sitelens::cli::run(argc, argv); }
