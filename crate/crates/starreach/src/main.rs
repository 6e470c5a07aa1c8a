fn main() {
    std::process::exit(starreach::cli::main_with_args(std::env::args_os()));
}
