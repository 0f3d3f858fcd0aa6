#include "alm/cli.hpp"

int main(int argc, char** argv) { return alm::cli::run(argc, argv); }
