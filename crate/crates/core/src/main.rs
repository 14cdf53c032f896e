fn main() {
    std::process::exit(ncerg::expcli::main_with_args(std::env::args_os()));
}
