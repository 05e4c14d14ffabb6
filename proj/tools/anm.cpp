#include "anm/cli.hpp"

int main(int argc, char** argv) { return anm::cli::dispatch(argc, argv); }
