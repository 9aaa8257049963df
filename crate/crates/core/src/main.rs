fn main() {
    std::process::exit(pshape::cli::main_with_args(std::env::args_os()));
}
