fn main() {
    std::process::exit(swarmlab_cli::main_with_args(std::env::args_os()));
}
