"""Built-in setups with the published experimental constants (lengths in mm)."""

from .core import ExperimentConfig, ScanSpec

STREKALOV_BEAM_NOTE = "beam width not given; defaulting a = 1/3 mm"

PRESETS = {
    "kim-shih": ExperimentConfig(
        wavelength=0.0007,
        slit_width=0.16,
        correlation_a=1 / 3,  # beam width 1/a = 3 mm
        z1=500.0,
        z2=1500.0,
        left_detector_y=0.0,
        scan=ScanSpec(-10.0, 10.0, 2001),
        name="kim-shih",
    ),
    "strekalov": ExperimentConfig(
        wavelength=0.000702,
        slit_width=0.4,
        correlation_a=1 / 3,
        z1=1000.0,
        z2=1650.0,
        left_detector_y=0.0,
        scan=ScanSpec(-10.0, 10.0, 2001),
        name="strekalov",
        notes=(STREKALOV_BEAM_NOTE,),
    ),
}


class UnknownPreset(KeyError):
    def __str__(self):
        return f"UnknownPreset: {self.args[0]!r} (known: {', '.join(sorted(PRESETS))})"


def get_preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(name) from None
