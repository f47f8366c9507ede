fn main() {
    std::process::exit(becfano::cli::main_with_args(std::env::args_os()));
}
