fn main() {
    std::process::exit(dfdcf_sim::cli::main_with_args(std::env::args_os()));
}
