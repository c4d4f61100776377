fn main() {
    std::process::exit(adiabatic_search::cli::main_with_args(std::env::args_os()));
}
