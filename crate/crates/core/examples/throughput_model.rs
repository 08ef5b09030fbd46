//! Reno throughput across the loss range, with and without link caps.

use pause_intensity::tcp::{
    effective_throughput, invert_throughput, reno_throughput_timeout, LinkConstraints, LossRate,
    TcpParams, Throughput,
};

fn main() -> pause_intensity::Result<()> {
    let params = TcpParams::default();
    let caps = LinkConstraints::default();
    println!("{:>8} {:>12} {:>12}", "loss", "reno B/s", "capped B/s");
    for p in [0.001, 0.005, 0.01, 0.02, 0.035, 0.06, 0.09, 0.12] {
        let loss = LossRate::new(p)?;
        let reno = reno_throughput_timeout(loss, &params).value();
        let eff = effective_throughput(loss, &params, &caps)?.value();
        println!("{p:>8} {reno:>12.1} {eff:>12.1}");
    }
    let p = invert_throughput(Throughput::new(75_000.0)?, &params)?;
    println!("75 KB/s needs loss {:.5}", p.value());
    Ok(())
}
