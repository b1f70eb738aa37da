fn main() {
    std::process::exit(netbell::cli::main_with_args(std::env::args_os()));
}
