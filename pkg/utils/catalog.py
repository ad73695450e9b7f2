"""
Catalog of prompt presets, sample games and bundled replay fixtures
"""

from pathlib import Path

from prompt_composer import PRESET_IDS

FIXTURES_DIR = Path(__file__).resolve().parent.parent / 'fixtures' / 'replay'

# What each preset adds to the prompt
PRESET_DESCRIPTIONS = {
    'P1': 'Instruction only',
    'P2': 'Instruction + level format',
    'P3': 'Instruction + level format + VGDL grammar',
    'P4': 'P3 + killSprite/stepBack constraint (C1)',
    'P5': 'P3 + removeSprite/stepBack constraint (C2)',
    'P6': 'P4 + Aliens example game',
    'P7': 'P5 + Aliens example game',
}

# Game names offered in the prompt studio
GAME_NAMES = {
    'a maze game': 'Navigate the avatar through walls to the goal',
    'a treasure hunt game': 'Collect the treasure hidden in a walled level',
    'a key and door game': 'Pick up the key before reaching the exit',
    'a sokoban game': 'Push boxes onto their targets',
    'a zelda-like dungeon game': 'Reach the exit while avoiding enemies',
}

SAMPLE_MAZE_RULES = """BasicGame
    SpriteSet
        wall    > Immovable    color=GRAY
        avatar  > MovingAvatar color=BLUE
        goal    > Immovable    color=GOLD singleton=True

    LevelMapping
        W > wall
        A > avatar
        G > goal

    TerminationSet
        SpriteCounter      stype=goal    limit=0 win=True

    InteractionSet
        avatar wall > stepBack
        avatar goal > removeSprite
"""

SAMPLE_MAZE_LEVEL = """WWWWWWWWW
WA      W
W W WWW W
W W    GW
W WWWWW W
W       W
WWWWWWWWW
"""


def get_preset_list():
    """Get list of preset ids"""
    return list(PRESET_IDS)


def get_preset_description(preset_id):
    """Get description for a preset id"""
    return PRESET_DESCRIPTIONS.get(preset_id.upper(), preset_id.upper())


def get_popular_games():
    """Get game names for quick selection"""
    return list(GAME_NAMES.keys())


def search_games(query):
    """Search game names and descriptions"""
    query = query.lower()
    matches = []

    for name, description in GAME_NAMES.items():
        if query in name or query in description.lower():
            matches.append(name)

    return matches


def get_fixture_providers(fixtures_dir=FIXTURES_DIR):
    """Provider folders with bundled responses"""
    fixtures_dir = Path(fixtures_dir)
    if not fixtures_dir.is_dir():
        return []
    return sorted(path.name for path in fixtures_dir.iterdir() if path.is_dir())


def get_fixture_text(provider, preset_id, fixtures_dir=FIXTURES_DIR):
    """Bundled response of a provider for a preset, None if absent"""
    path = Path(fixtures_dir) / provider / f'{preset_id.lower()}.txt'
    if not path.exists():
        return None
    return path.read_text(encoding='utf-8')
