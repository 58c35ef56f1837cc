use std::io;

fn main() {
    let code = rbem_cli::run_args(
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr(),
    );
    std::process::exit(code as i32);
}
