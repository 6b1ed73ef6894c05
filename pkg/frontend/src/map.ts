// Leaflet layer: one circle per geocoded institution, area encoding
// output, colour encoding the rank score, black border marking the
// current selection.

import L from 'leaflet';
import type { SubjectResult } from './types';
import type { ViewState, Viewport } from './state';
import {
    DEFAULT_TILE_URL,
    LABEL_MIN_ZOOM,
    LABEL_TILE_URL,
    TILE_ATTRIBUTION,
    circleRadius,
    colorForScore,
} from './scales';

export interface MapCallbacks {
    onToggle(institutionId: string): void;
    onViewport(viewport: Viewport): void;
}

export class InstitutionMap {
    private readonly map: L.Map;
    private readonly circles = new Map<string, L.CircleMarker>();
    private layer: L.LayerGroup | null = null;

    constructor(element: HTMLElement, viewport: Viewport,
                private readonly callbacks: MapCallbacks,
                tileUrl: string = DEFAULT_TILE_URL) {
        this.map = L.map(element, { worldCopyJump: true })
            .setView([viewport.lat, viewport.lon], viewport.zoom);
        L.tileLayer(tileUrl, { attribution: TILE_ATTRIBUTION }).addTo(this.map);
        if (tileUrl === DEFAULT_TILE_URL) {
            // label overlay only past the zoom threshold, so labels never
            // crowd the data markers at world scale
            L.tileLayer(LABEL_TILE_URL, { minZoom: LABEL_MIN_ZOOM }).addTo(this.map);
        }
        this.map.on('moveend zoomend', () => {
            const center = this.map.getCenter();
            this.callbacks.onViewport({
                lat: center.lat, lon: center.lng, zoom: this.map.getZoom(),
            });
        });
    }

    render(subject: SubjectResult, state: ViewState): void {
        if (this.layer) {
            this.layer.remove();
        }
        this.circles.clear();
        const group = L.layerGroup();
        for (const row of subject.institutions) {
            if (row.latitude === null || row.longitude === null) {
                continue; // listed in the table with a badge instead
            }
            const selected = state.selection.includes(row.institution_id);
            const circle = L.circleMarker([row.latitude, row.longitude], {
                radius: circleRadius(row.n_papers),
                fillColor: colorForScore(row.rank_score),
                fillOpacity: 0.75,
                color: '#000',
                weight: selected ? 2 : 0,
            });
            circle.bindTooltip(
                `${row.name} — ${row.n_papers} papers, ` +
                `${(100 * row.eb_prob).toFixed(1)}% excellent`);
            circle.on('click', () => this.callbacks.onToggle(row.institution_id));
            this.circles.set(row.institution_id, circle);
            group.addLayer(circle);
        }
        group.addTo(this.map);
        this.layer = group;
    }

    setViewport(viewport: Viewport): void {
        const center = this.map.getCenter();
        if (center.lat !== viewport.lat || center.lng !== viewport.lon ||
            this.map.getZoom() !== viewport.zoom) {
            this.map.setView([viewport.lat, viewport.lon], viewport.zoom);
        }
    }
}
