fn main() {
    let mut failed = 0;
    let mut total = 0;
    for outcome in spinboson_acceptance::run_all() {
        println!("{outcome}");
        total += 1;
        failed += usize::from(!outcome.pass);
    }
    println!("acceptance: {} of {total} criteria pass", total - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
