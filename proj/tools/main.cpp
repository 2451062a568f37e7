#include "pumpq/io.hpp"

int main(int argc, char** argv) { return pumpq::run_command(argc, argv); }
