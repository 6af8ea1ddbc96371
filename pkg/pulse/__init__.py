from .fluxPulse import FluxPulse, Waveform, envelope, flux_at, synthesize, idle_pulse
