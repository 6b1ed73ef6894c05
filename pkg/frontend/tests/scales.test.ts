import { describe, expect, it } from 'vitest';

import { SCORE_CLAMP, circleRadius, colorForScore } from '../src/scales';

function channels(color: string): [number, number, number] {
    const match = color.match(/^rgb\((\d+), (\d+), (\d+)\)$/);
    if (!match) throw new Error(`unexpected colour ${color}`);
    return [Number(match[1]), Number(match[2]), Number(match[3])];
}

describe('circleRadius', () => {
    it('encodes paper count as area: 500 vs 2000 papers gives 1:2 radii', () => {
        const small = circleRadius(500);
        const large = circleRadius(2000);
        expect(large / small).toBeCloseTo(2.0, 12);
        // the ratio survives pixel rounding within one pixel
        expect(Math.abs(Math.round(large) - 2 * Math.round(small))).toBeLessThanOrEqual(1);
    });

    it('is monotone and zero-safe', () => {
        expect(circleRadius(0)).toBe(0);
        expect(circleRadius(100)).toBeLessThan(circleRadius(101));
    });
});

describe('colorForScore', () => {
    it('maps a zero score to grey', () => {
        expect(colorForScore(0)).toBe('rgb(187, 187, 187)');
    });

    it('tints above-mean scores blue and below-mean scores red', () => {
        const [rUp, , bUp] = channels(colorForScore(Math.log(2)));
        expect(bUp).toBeGreaterThan(rUp);
        const [rDown, , bDown] = channels(colorForScore(-Math.log(2)));
        expect(rDown).toBeGreaterThan(bDown);
    });

    it('clamps at |ln 3| so outliers cannot stretch the ramp', () => {
        expect(colorForScore(SCORE_CLAMP)).toBe(colorForScore(10));
        expect(colorForScore(-SCORE_CLAMP)).toBe(colorForScore(-10));
    });

    it('moves smoothly away from grey as the score grows', () => {
        const grey = channels(colorForScore(0));
        const mid = channels(colorForScore(SCORE_CLAMP / 2));
        const full = channels(colorForScore(SCORE_CLAMP));
        const distance = (a: number[], b: number[]) =>
            Math.hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
        expect(distance(mid, grey)).toBeGreaterThan(0);
        expect(distance(full, grey)).toBeGreaterThan(distance(mid, grey));
    });
});
