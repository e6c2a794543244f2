"""
Adversary campaigns
===================

Run every attack campaign on a small assembly through the same entry points
the command line uses, and print each campaign summary.
"""

from safesip.harness import loads_config, run_campaign

base = "width = 8\nkappa = 4\nn_chiplets = 4\nseed = 11\n"
campaigns = {
    "tamper_exhaustive": "n_chiplets = 1\n",
    "replay": "replays = 100\n",
    "dos": "runs = 50\n",
    "forge": "forgeries = 100\n",
    "removal_probe": "observations = 10000\n",
}

for name, extra in campaigns.items():
    text = f"campaign = {name}\n" + extra + "".join(
        line + "\n" for line in base.splitlines() if line.split(" =")[0] not in extra)
    result = run_campaign(loads_config(text))
    print(f"{name:18}", result.summary)
