// Visual encodings for the map circles.

// Circle AREA is proportional to paper count, so the pixel radius grows
// with the square root. The factor only sets the overall map density.
export const RADIUS_PER_SQRT_PAPER = 0.45;

export function circleRadius(nPapers: number): number {
    return RADIUS_PER_SQRT_PAPER * Math.sqrt(Math.max(nPapers, 0));
}

// Diverging colour ramp on the rank score (log ratio to the subject
// mean): blue above the mean, grey near zero, red below — a pure data
// encoding with no reference to statistical testing. Scores are clamped
// at |ln 3| so a single extreme institution cannot wash out the
// mid-range contrast.
export const SCORE_CLAMP = Math.log(3);

const BLUE: [number, number, number] = [33, 102, 172];
const GREY: [number, number, number] = [187, 187, 187];
const RED: [number, number, number] = [178, 24, 43];

function mix(a: [number, number, number], b: [number, number, number], t: number): string {
    const channel = (i: number) => Math.round(a[i] + (b[i] - a[i]) * t);
    return `rgb(${channel(0)}, ${channel(1)}, ${channel(2)})`;
}

export function colorForScore(rankScore: number): string {
    const clamped = Math.max(-SCORE_CLAMP, Math.min(SCORE_CLAMP, rankScore));
    const t = Math.abs(clamped) / SCORE_CLAMP;
    return clamped >= 0 ? mix(GREY, BLUE, t) : mix(GREY, RED, t);
}

// Map labels only appear once the user has zoomed in far enough that
// they cannot crowd the data markers.
export const LABEL_MIN_ZOOM = 6;

// Any slippy-map XYZ server can be substituted via the `tiles` URL
// parameter; the default is a neutral, label-free style.
export const DEFAULT_TILE_URL =
    'https://{s}.basemaps.cartocdn.com/light_nolabels/{z}/{x}/{y}.png';
export const LABEL_TILE_URL =
    'https://{s}.basemaps.cartocdn.com/light_only_labels/{z}/{x}/{y}.png';
export const TILE_ATTRIBUTION =
    '&copy; OpenStreetMap contributors &copy; CARTO';
