fn main() {
    std::process::exit(confquant::cli::main_with(std::env::args_os()));
}
