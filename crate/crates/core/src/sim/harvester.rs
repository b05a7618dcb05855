//! RC charging of the harvesting capacitor.

use crate::energy::HarvesterParams;

/// State of the harvesting capacitor between transfers.
#[derive(Debug, Clone)]
pub struct Harvester {
    tau: f64,
    capacitance: f64,
    ideal_diode: bool,
    /// Capacitor voltage, V.
    pub voltage: f64,
}

impl Harvester {
    pub fn new(p: &HarvesterParams) -> Self {
        Self { tau: p.resistance * p.capacitance, capacitance: p.capacitance, ideal_diode: p.ideal_diode, voltage: 0.0 }
    }

    /// Connect the capacitor to a constant source `x` for `dt` seconds.
    pub fn charge(&mut self, x: f64, dt: f64) {
        if dt <= 0.0 || (self.ideal_diode && x <= self.voltage) {
            return;
        }
        self.voltage = x + (self.voltage - x) * (-dt / self.tau).exp();
    }

    pub fn stored_energy(&self) -> f64 {
        0.5 * self.capacitance * self.voltage * self.voltage
    }

    /// Move the stored energy out and reset the capacitor.
    pub fn transfer(&mut self) -> f64 {
        let e = self.stored_energy();
        self.voltage = 0.0;
        e
    }
}

/// Capacitor voltage after charging from `v0` toward a constant `x` for `t_h`.
pub fn rc_closed_form(v0: f64, x: f64, t_h: f64, tau: f64) -> f64 {
    x + (v0 - x) * (-t_h / tau).exp()
}

/// Energy per sample delivered by dumping `c_eh` charged to `v_eh` once
/// every `cycle_samples` samples, `C V^2 / (2 cycle)`.
pub fn transfer_energy_per_sample(c_eh: f64, v_eh: f64, cycle_samples: usize) -> f64 {
    0.5 * c_eh * v_eh * v_eh / cycle_samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::Efficiency;

    fn params(ideal_diode: bool) -> HarvesterParams {
        HarvesterParams {
            resistance: 23.75,
            capacitance: 40e-9,
            efficiency: Efficiency::Fixed(0.7),
            transfer_period_samples: 337,
            transfer_dead_time: 0.0,
            ideal_diode,
        }
    }

    #[test]
    fn substeps_match_closed_form() {
        let mut h = Harvester::new(&params(false));
        h.voltage = 0.1;
        let t_h = 22.5e-9;
        for _ in 0..16 {
            h.charge(0.7, t_h / 16.0);
        }
        let want = rc_closed_form(0.1, 0.7, t_h, 23.75 * 40e-9);
        assert!((h.voltage - want).abs() <= 1e-14 * want);
    }

    #[test]
    fn bidirectional_discharges_and_diode_blocks() {
        let mut h = Harvester::new(&params(false));
        h.voltage = 0.5;
        h.charge(0.0, 1e-6);
        assert!(h.voltage < 0.5);
        let mut d = Harvester::new(&params(true));
        d.voltage = 0.5;
        d.charge(0.0, 1e-6);
        assert_eq!(d.voltage, 0.5);
        d.charge(0.8, 1e-6);
        assert!(d.voltage > 0.5 && d.voltage < 0.8);
    }

    #[test]
    fn transfer_resets() {
        let mut h = Harvester::new(&params(false));
        h.voltage = 0.481152;
        let e = h.transfer();
        assert!((e - 0.5 * 40e-9 * 0.481152f64.powi(2)).abs() < 1e-20);
        assert_eq!(h.voltage, 0.0);
    }
}
