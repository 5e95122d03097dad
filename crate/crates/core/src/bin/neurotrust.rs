fn main() {
    std::process::exit(neurotrust::harness::cli::main_with_args(std::env::args_os()));
}
