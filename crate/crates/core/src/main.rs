fn main() {
    std::process::exit(oz_thermo::cli::main_with_args(std::env::args_os()));
}
