#include "etd_app/commands.hpp"

int main(int argc, char** argv) { return etd::app::run_cli(argc, argv); }
