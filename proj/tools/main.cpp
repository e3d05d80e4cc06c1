#include "app.hpp"

int main(int argc, char** argv) { return radcav::cli::run_cli(argc, argv); }
