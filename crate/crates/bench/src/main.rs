fn main() {
    std::process::exit(perfport_bench::run(std::env::args_os()));
}
