#include "commands.hpp"

int main(int argc, char** argv) { return fsel::cli::run(argc, argv); }
