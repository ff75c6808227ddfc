//! The analytic throughput models: CPU AES rates converted to network
//! bandwidth, the FPGA AND-core series, fabric capacity, and the
//! utilization fit.

use ringshare::perf;

fn main() {
    let cpu = perf::cpu_table();
    println!("CPU: Gbps = AES/s x {} AND bits x (1 + {})\n", perf::ANDS_PER_AES, perf::TCP_OVERHEAD);
    print!("{}", perf::cpu_table_text(&cpu));

    let fpga = perf::fpga_table();
    println!("\nFPGA at {} MHz, {}-bit lanes, II {}:\n", perf::FPGA_CLOCK_HZ / 1e6, perf::FPGA_WIDTH, perf::FPGA_INITIATION_INTERVAL);
    print!("{}", perf::fpga_table_text(&fpga));

    println!();
    for usable in [1.0, 0.7] {
        let est = perf::capacity_estimate(perf::FPGA_INSTANCE_UTILIZATION_PCT, usable, perf::FPGA_INITIATION_INTERVAL).unwrap();
        println!("{:>3.0}% of the fabric: {} instances", usable * 100.0, est.instances);
    }
    let ops = perf::ops_per_cycle(48, perf::FPGA_INITIATION_INTERVAL);
    println!("48 instances at 200 MHz saturate {:.1} Gbps", perf::saturated_gbps(ops, perf::FPGA_WIDTH, 200e6));

    let fit = perf::utilization_fit(&perf::FPGA_UTILIZATION_POINTS).unwrap();
    println!("\nutilization ~ {:.5} x cores + {:.5}  (r^2 = {:.5})", fit.slope, fit.intercept, fit.r_squared);
}
