from .campaigns import CampaignResult, attack_campaigns, removal_probe
from .config import ScenarioConfig, load_config, loads_config, parse_hook
from .scenario import run_campaign, run_scenario
from .sweep import HdReport, HdRow, complexity_report, hd_sweep
