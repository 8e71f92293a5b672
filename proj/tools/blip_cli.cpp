#include "blip/cli.hpp"

int main(int argc, char** argv) { return blip::cli::run(argc, argv); }
