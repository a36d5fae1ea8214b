fn main() {
    std::process::exit(netprop::cli::run(std::env::args_os()));
}
