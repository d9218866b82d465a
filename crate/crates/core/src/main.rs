fn main() {
    std::process::exit(leo_offload::cli::main_with_args(std::env::args_os()));
}
