fn main() -> std::process::ExitCode {
    fade::harness::cli::main()
}
