fn main() {
    std::process::exit(mdiforest_core::cli::main_with_args(std::env::args_os()));
}
