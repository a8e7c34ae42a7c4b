fn main() {
    std::process::exit(tsrm::app::main_with_args(std::env::args_os()));
}
