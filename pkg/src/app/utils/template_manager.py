from jinja2 import DictLoader, Environment, StrictUndefined

from app.utils.enums import TemplateName
from app.utils.utilities import Utilities


TEMPLATES = {
    TemplateName.TIMING_REPORT.value: """\
timing budget
  detector_to_ttm_ns      {{ report.detector_to_ttm_ns | f6 }}
  ttm_processing_ns       {{ report.ttm_processing_ns | f6 }}
  signal_propagation_ns   {{ report.signal_propagation_ns | f6 }}
  latency_ns              {{ report.latency_ns | f6 }}
  delay_fiber_m           {{ report.delay_fiber_m | f6 }}
  photon_delay_ns         {{ report.photon_delay_ns | f6 }}
  switch_response_ns      {{ report.switch_response_ns | f6 }}
  slack_ns                {{ report.slack_ns | f6 }}
  gate_duration_ns        {{ report.gate_duration_ns | f6 }}
  required_gate_ns        {{ report.required_gate_ns | f6 }}
  max_herald_rate_hz      {{ report.max_herald_rate_hz | f6 }}
{% for reason in report.reasons %}
  reason: {{ reason }}
{% endfor %}
{{ "FEASIBLE" if report.feasible else "INFEASIBLE" }}

loss budget
{% for component in loss.components %}
  {{ "%-22s" | format(component.name) }}  {{ component.db | f6 }} dB
{% endfor %}
  total {{ loss.total_db | f6 }} dB  (transmission {{ loss.transmission | f6 }})
""",
    TemplateName.TOMOGRAPHY_REPORT.value: """\
tomography ({{ dim }}-dimensional, {{ n_settings }} settings)
  target        {{ target }}
  fidelity      {{ fidelity | f6 }}
  purity        {{ purity | f6 }}
{% if concurrence is not none %}
  concurrence   {{ concurrence | f6 }}
{% endif %}
  residual      {{ residual | f6 }}
  iterations    {{ iterations }}
  converged     {{ "yes" if converged else "no" }}
density matrix (re, im)
{% for row in rows %}
  {{ row }}
{% endfor %}
""",
    TemplateName.COMPENSATION_REPORT.value: """\
fiber compensation (seed {{ seed }})
  iterations        {{ report.iterations }}
  residual          {{ report.residual_infidelity | f6 }}
  converged         {{ "yes" if report.converged else "no" }}
  H-basis passes    {{ report.basis_passes["H"] }}
  D-basis passes    {{ report.basis_passes["D"] }}
  twist_rad         {{ report.twist | f6 }}
  tilt_rad          {{ report.tilt | f6 }}
  phase_rad         {{ report.phase | f6 }}
""",
    TemplateName.SWEEP_SUMMARY.value: """\
sweep {{ plane }} ff-{{ "on" if feedforward else "off" }}: {{ n_points }} points
  fidelity mean {{ mean | f6 }}  min {{ low | f6 }}  max {{ high | f6 }}
  wrote {{ csv_path }}
  wrote {{ json_path }}
""",
}


class TemplateManager:
    _instance = None
    _initialized = False

    def __new__(cls, *args, **kwargs):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not TemplateManager._initialized:
            TemplateManager._initialized = True
            self._env = Environment(
                loader=DictLoader(TEMPLATES),
                trim_blocks=True,
                lstrip_blocks=True,
                keep_trailing_newline=True,
                undefined=StrictUndefined,
            )
            self._env.filters["f6"] = Utilities.fmt6

    def get_template(self, template_name: TemplateName, render: bool = False, **kwargs) -> str:
        if not render:
            return TEMPLATES[template_name.value]
        template = self._env.get_template(template_name.value)
        return template.render(**kwargs)

    def render_template(self, template_name: TemplateName, **kwargs) -> str:
        return self.get_template(template_name, render=True, **kwargs)
